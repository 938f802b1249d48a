#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "terids/cdd.h"
#include "terids/metric.h"
#include "terids/model.h"

namespace terids {

// Frequencies F(v) of candidate values for one attribute.
struct CandidateDistribution {
  int attr = 0;
  std::map<TokenSet, std::int64_t> freq;

  std::int64_t Total() const;
  bool empty() const { return freq.empty(); }
};

struct Candidate {
  TokenSet value;
  double prob = 1.0;
};

// Lazily cached distances between domain values, shared by every imputation
// path so that all of them produce bit-identical distributions.
class ImputeContext {
 public:
  ImputeContext(const Repository& repo, DistanceFn dist);

  const Repository& repo() const { return *repo_; }
  const DistanceFn& dist() const { return dist_; }

  // Distances from Domain(attr)[value_id] to every value of Domain(attr).
  const std::vector<double>& DomainRow(int attr, int value_id) const;

  // Adds cand(s[A_j]) of one supporting sample to per-domain-id counts.
  void AddCandidates(const CddRule& rule, std::size_t sample,
                     std::vector<std::int64_t>& counts) const;

  // Converts per-domain-id counts to a distribution.
  CandidateDistribution ToDistribution(int attr, std::span<const std::int64_t> counts) const;

 private:
  const Repository* repo_;
  DistanceFn dist_;
  mutable std::vector<std::vector<std::vector<double>>> rows_;
};

// Single-rule imputation by scanning every repository sample. Throws
// kNoSupportingSample when no sample satisfies the determinants.
CandidateDistribution ImputeSingleRule(const StreamTuple& r, const CddRule& rule,
                                       const ImputeContext& ctx);

// Same, restricted to the given sample ids (a superset of the supporting
// samples); the exact determinant check still runs on each.
CandidateDistribution ImputeSingleRuleOver(const StreamTuple& r, const CddRule& rule,
                                           const ImputeContext& ctx,
                                           std::span<const std::size_t> samples);

// Combines per-rule frequency distributions by summing frequencies and
// normalizing. Empty distributions contribute nothing. Returned candidates
// are sorted by descending probability, ties by value.
std::vector<Candidate> CombineDistributions(std::span<const CandidateDistribution> dists);

// Multi-rule imputation over all applicable rules by linear scan. Throws
// kImputationFailed if no rule yields a candidate.
std::vector<Candidate> ImputeMultiRule(const StreamTuple& r, std::span<const CddRule> rules,
                                       const ImputeContext& ctx);

// Uniform distribution over the top-k most frequent domain values.
std::vector<Candidate> FallbackCandidates(const Repository& repo, int attr, std::size_t k);

// A tuple whose missing attributes carry candidate distributions. Present
// attributes hold a single candidate with probability 1.
struct ImputedTuple {
  StreamTuple base;
  std::vector<std::vector<Candidate>> candidates;
  std::vector<bool> fallback;  // per attribute, set when fallback imputation was used

  bool any_fallback() const;
  std::size_t InstanceCount() const;  // saturates at SIZE_MAX
};

ImputedTuple AsImputed(const StreamTuple& complete);

struct ImputeOptions {
  std::size_t fallback_k = 5;
};

// Imputes each missing attribute independently from the rules whose
// dependent is that attribute and whose determinants are all present.
// `rules_by_attr[j]` lists rules with dependent j.
ImputedTuple ImputeByScan(const StreamTuple& r,
                          std::span<const std::vector<CddRule>> rules_by_attr,
                          const ImputeContext& ctx, const ImputeOptions& opts = {});

struct Instance {
  std::vector<int> choice;  // candidate index per attribute
  double prob = 1.0;
};

struct InstanceSet {
  std::vector<Instance> instances;  // descending probability
  double residual = 0.0;            // mass of instances dropped by the limit
  bool truncated = false;
};

InstanceSet ExpandInstances(const ImputedTuple& it, std::size_t limit);

StreamTuple Materialize(const ImputedTuple& it, const Instance& inst);

}  // namespace terids
