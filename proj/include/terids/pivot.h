#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "terids/metric.h"
#include "terids/model.h"

namespace terids {

struct PivotParams {
  int buckets = 10;           // P
  double entropy_min = 1.5;   // eMin
  int max_pivots = 3;         // cntMax
  std::size_t candidate_limit = 256;  // larger domains are searched at an even stride
};

// Bucket of a distance in the uniform P-way partition of [0,1].
int DistanceBucket(double dist, int buckets);

// Per attribute, an ordered list of pivot values: index 0 is the main pivot,
// the rest are auxiliary.
class PivotSet {
 public:
  PivotSet() = default;
  PivotSet(std::vector<std::vector<TokenSet>> pivots, PivotParams params);

  int dims() const { return static_cast<int>(pivots_.size()); }
  int Count(int attr) const { return static_cast<int>(pivots_[attr].size()); }
  const TokenSet& Pivot(int attr, int a) const { return pivots_[attr][a]; }
  const TokenSet& Main(int attr) const { return pivots_[attr].front(); }
  const PivotParams& params() const { return params_; }

  // Distances from `value` to every pivot of `attr`; entry 0 is the
  // indexing coordinate.
  std::vector<double> Convert(const TokenSet& value, int attr, const DistanceFn& dist) const;

  // One `PIVOT attr=<x> idx=<a> tokens=<t+t+...>` line per pivot.
  std::string Serialize() const;
  // Reads PIVOT lines, ignoring anything else.
  static PivotSet Parse(std::string_view text, PivotParams params);

  bool operator==(const PivotSet& o) const { return pivots_ == o.pivots_; }

 private:
  std::vector<std::vector<TokenSet>> pivots_;
  PivotParams params_;
};

// Shannon entropy (log2) of the bucketed distances from `candidate` to every
// sample's value of `attr`.
double Entropy(const TokenSet& candidate, int attr, const Repository& repo, int buckets,
               const DistanceFn& dist);

// Entropy over the product bucket grid induced by several pivots.
double JointEntropy(std::span<const TokenSet> pivots, int attr, const Repository& repo,
                    int buckets, const DistanceFn& dist);

PivotSet SelectPivots(const Repository& repo, const PivotParams& params, const DistanceFn& dist);

}  // namespace terids
