#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "terids/impute.h"
#include "terids/keywords.h"
#include "terids/metric.h"
#include "terids/model.h"
#include "terids/pivot.h"

namespace terids {

// Matches need Pr > alpha + kAlphaTol; bounds prune at <= alpha.
inline constexpr double kAlphaTol = 1e-9;
// Similarity bounds prune at <= gamma - kGammaTol.
inline constexpr double kGammaTol = 1e-9;

// Summary of every possible instance of an imputed tuple. Also used, with
// covering semantics, as the aggregate of a group of tuples.
struct TupleProfile {
  KeywordMask keywords;                        // V_r: OR over candidate values
  std::vector<SizeInterval> sizes;             // SI_x
  std::vector<std::vector<DistInterval>> piv;  // I_{x,a}
  std::vector<std::vector<double>> expected;   // E(dist(r[A_x], piv_a))
};

TupleProfile BuildProfile(const ImputedTuple& it, const PivotSet& pivots,
                          std::span<const std::string> keywords, const DistanceFn& dist);

// Widens `into` to cover `o` (keywords, sizes, pivot intervals).
void CoverProfile(TupleProfile& into, const TupleProfile& o);
// Whether `outer` covers `inner` in keywords, sizes and pivot intervals.
bool ProfileCovers(const TupleProfile& outer, const TupleProfile& inner);

bool KeywordPrune(const TupleProfile& a, const TupleProfile& b);
double SimUbSize(const TupleProfile& a, const TupleProfile& b);
// d minus, per attribute, the largest pivot-implied minimum distance.
double SimUbPivot(const TupleProfile& a, const TupleProfile& b);
bool SimUbPrune(const TupleProfile& a, const TupleProfile& b, double gamma);

struct PzInputs {
  double ex = 0, ey = 0;
  double lb_x = 0, ub_x = 0;
  double lb_y = 0, ub_y = 0;
};
double ProbUbFromMoments(const PzInputs& in, int dims, double gamma);
// Bound from distances to the main pivots summed over attributes.
double ProbUb(const TupleProfile& a, const TupleProfile& b, int dims, double gamma);

enum class PruneStage { kKeyword, kSimUbSize, kSimUbPivot, kProbUb, kInstanceLevel, kNone };
const char* PruneStageName(PruneStage s);
inline constexpr int kPruneStageCount = 6;

struct PairVerdict {
  PruneStage pruned_by = PruneStage::kNone;
  // Confirmed probability mass; exact unless refinement stopped early.
  std::optional<double> prob;
  bool match = false;
};

// An imputed tuple with everything the cascade needs precomputed.
struct PreparedTuple {
  ImputedTuple it;
  TupleProfile profile;
  InstanceSet instances;
  std::vector<std::vector<char>> has_keyword;  // [attr][candidate]
  std::vector<char> instance_keyword;          // per instance
};

PreparedTuple Prepare(ImputedTuple it, const PivotSet& pivots, const QueryConfig& cfg,
                      const DistanceFn& dist, std::size_t instance_limit);

struct RefineOptions {
  bool stop_on_prune = true;
  bool stop_on_match = false;
};

// Visits instance pairs in descending joint probability and accumulates the
// mass of pairs sharing a keyword with similarity above gamma.
PairVerdict Refine(const PreparedTuple& a, const PreparedTuple& b, const QueryConfig& cfg,
                   const RefineOptions& opts = {});

// Keyword, similarity bounds, probability bound, then refinement.
PairVerdict Cascade(const PreparedTuple& a, const PreparedTuple& b, const QueryConfig& cfg,
                    const RefineOptions& opts = {});

}  // namespace terids
