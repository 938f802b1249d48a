#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "terids/metric.h"
#include "terids/model.h"

namespace terids {

struct ConstantConstraint {
  TokenSet value;
  bool operator==(const ConstantConstraint&) const = default;
};

// eps_min <= dist <= eps_max, or eps_min < dist <= eps_max when min_exclusive.
struct IntervalConstraint {
  double eps_min = 0.0;
  double eps_max = 0.0;
  bool min_exclusive = false;

  bool Admits(double dist) const {
    return (min_exclusive ? dist > eps_min : dist >= eps_min) && dist <= eps_max;
  }
  bool operator==(const IntervalConstraint&) const = default;
};

// Placeholder for a determinant attribute a rule does not constrain. Only
// appears in padded index entries; never consulted by satisfaction checks.
struct MissingMarker {
  bool operator==(const MissingMarker&) const = default;
};

struct AttrConstraint {
  int attr = 0;
  std::variant<MissingMarker, ConstantConstraint, IntervalConstraint> kind;

  bool IsConstant() const { return std::holds_alternative<ConstantConstraint>(kind); }
  bool IsInterval() const { return std::holds_alternative<IntervalConstraint>(kind); }
  bool IsMissing() const { return std::holds_alternative<MissingMarker>(kind); }
  bool operator==(const AttrConstraint&) const = default;
};

struct CddRule {
  std::vector<AttrConstraint> determinants;  // sorted by attr
  int dependent = 0;
  DistInterval dep_interval;

  std::vector<int> DeterminantAttrs() const;
  bool operator==(const CddRule&) const = default;
};

// Throws kConfigError if the rule violates its structural invariants.
void ValidateRule(const CddRule& rule);

// Whether (r, s) meets every Constant and Interval constraint of the rule.
// Throws kDeterminantMissing if r lacks a constrained attribute.
bool SatisfiesDeterminants(const CddRule& rule, const StreamTuple& r, const StreamTuple& s,
                           const DistanceFn& dist);

// True iff r carries every attribute the rule constrains and equals its
// constants, i.e. some sample could satisfy the determinants with r.
bool RuleApplicable(const CddRule& rule, const StreamTuple& r);

struct DetectParams {
  double max_interval_width = 0.3;
  int min_support = 3;
  double max_determinant_distance = 0.3;  // widest determinant bucket end
  std::size_t max_samples = 2000;  // mining uses the first samples only; 0 = all
};

// Bounded CDD mining: determinant sets of size <= 2, determinant distances
// quantized into closed buckets of width 0.1 up to max_determinant_distance,
// constants for attributes whose single-attribute dependency is too loose.
// Every emitted rule holds on all pairs of the mined samples. Throws kNoRulesFound when nothing passes.
std::vector<CddRule> DetectCdds(const Repository& repo, const DetectParams& params,
                                const DistanceFn& dist);

std::string FormatRule(const CddRule& rule);
CddRule ParseRule(std::string_view line);
std::string SerializeRules(std::span<const CddRule> rules);
std::vector<CddRule> ParseRules(std::string_view text);

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double v);

}  // namespace terids
