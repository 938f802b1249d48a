#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "terids/model.h"

namespace terids {

enum class DistanceKind {
  kJaccard,
  // |x - y| over single-token numeric values, falling back to the discrete
  // metric (0 if equal, 1 otherwise) for non-numeric tokens. Only meant for
  // reproducing small numeric fixtures.
  kAbsDiff,
};

struct DistanceFn {
  DistanceKind kind = DistanceKind::kJaccard;

  double operator()(const TokenSet& a, const TokenSet& b) const;
};

double JaccardSim(const TokenSet& a, const TokenSet& b);
inline double JaccardDistance(const TokenSet& a, const TokenSet& b) {
  return 1.0 - JaccardSim(a, b);
}

// Sum of per-attribute Jaccard similarities. Throws kIncompleteTuple.
double TupleSim(const StreamTuple& r, const StreamTuple& r2);

struct SizeInterval {
  int min_size = 1;
  int max_size = 1;
};

struct DistInterval {
  double lb = 0.0;
  double ub = 0.0;

  bool Contains(double v) const { return lb <= v && v <= ub; }
  bool Intersects(const DistInterval& o) const { return lb <= o.ub && o.lb <= ub; }
  void Cover(const DistInterval& o) {
    lb = std::min(lb, o.lb);
    ub = std::max(ub, o.ub);
  }
  bool operator==(const DistInterval&) const = default;
};

// Per-attribute Jaccard upper bound from token-set size ranges.
double UbSimBySizeAttr(const SizeInterval& i, const SizeInterval& j);
// Sum over attributes of UbSimBySizeAttr.
double UbSimBySize(std::span<const SizeInterval> si_i, std::span<const SizeInterval> si_j);

// Smallest possible |X - Y| for X in x, Y in y.
double MinDist(const DistInterval& x, const DistInterval& y);
// d minus the summed minimum distances implied by distances to one pivot.
double UbSimByPivot(std::span<const DistInterval> di_i, std::span<const DistInterval> di_j);

}  // namespace terids
