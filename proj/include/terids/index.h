#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "terids/cdd.h"
#include "terids/keywords.h"
#include "terids/metric.h"
#include "terids/model.h"
#include "terids/pivot.h"
#include "terids/rtree.h"

namespace terids {

// Pivot coordinates of a tuple, [attr][pivot]; empty for missing attributes.
using Converted = std::vector<std::vector<double>>;

Converted ConvertTuple(const StreamTuple& r, const PivotSet& pivots, const DistanceFn& dist);

// Per attribute, per pivot, an admissible coordinate range.
struct PivotBox {
  std::vector<std::vector<DistInterval>> iv;

  static PivotBox Universal(const PivotSet& pivots);
  bool Contains(const Converted& c) const;
};

// Coarse range of supporting-sample coordinates for `rule` given the tuple
// being imputed. Every sample s with SatisfiesDeterminants(rule, r, s) lies
// inside.
PivotBox BoxForRule(const CddRule& rule, const Converted& r_conv, const PivotSet& pivots,
                    const DistanceFn& dist);

// Rules with one dependent attribute, grouped by determinant sets and packed
// into aggregate trees keyed by constraint coordinates.
class CddIndex {
 public:
  // Aggregate of one head attribute over a subtree.
  struct DimAgg {
    bool has_constant = false;
    bool has_interval = false;
    bool has_missing = false;
    std::vector<DistInterval> constant_cover;  // per pivot; valid when has_constant
  };
  struct NodeAgg {
    std::vector<DimAgg> dims;  // parallel to the group head
    DistInterval dep_cover;
  };
  struct Group {
    std::vector<int> head;  // X_m, sorted
    std::vector<int> rules;  // indices into rules()
    PackedTree tree;  // leaf children index into `rules` above
    std::vector<NodeAgg> aggs;  // per tree node
  };

  CddIndex() = default;
  CddIndex(int dependent, std::vector<CddRule> rules, const PivotSet& pivots,
           const DistanceFn& dist, std::size_t fanout = 8);

  int dependent() const { return dependent_; }
  const std::vector<CddRule>& rules() const { return rules_; }
  const std::vector<Group>& groups() const { return groups_; }
  // Attribute-set combinations of group heads, by level.
  const std::vector<std::vector<std::vector<int>>>& lattice() const { return lattice_; }

  // Pivot coordinates of a rule's constant on `attr`, computed at build time.
  const std::vector<double>& ConstantCoords(std::size_t rule, int attr) const;

  // Indices of rules r can use: every constrained attribute present and every
  // constant equal to r's value. Ascending order.
  std::vector<std::size_t> CandidateRules(const StreamTuple& r, const Converted& r_conv) const;

  // How many tree nodes the last CandidateRules call visited.
  std::size_t last_visited() const { return last_visited_; }

 private:
  bool LeafAccepts(const CddRule& rule, const StreamTuple& r) const;

  int dependent_ = 0;
  std::vector<CddRule> rules_;
  std::vector<std::vector<std::vector<double>>> const_coords_;  // [rule][attr] -> coords
  std::vector<Group> groups_;
  std::vector<std::vector<std::vector<int>>> lattice_;
  mutable std::size_t last_visited_ = 0;
};

// Aggregate tree over pivot-converted repository samples.
class DrIndex {
 public:
  struct NodeAgg {
    std::vector<std::vector<DistInterval>> piv;  // [attr][pivot]
    KeywordMask keywords;
    std::vector<SizeInterval> sizes;
  };

  DrIndex() = default;
  DrIndex(const Repository& repo, const PivotSet& pivots, std::span<const std::string> keywords,
          const DistanceFn& dist, std::size_t fanout = 8);

  std::size_t size() const { return coords_.size(); }
  const Converted& Coords(std::size_t sample) const { return coords_[sample]; }
  const KeywordMask& Keywords(std::size_t sample) const { return masks_[sample]; }
  const std::vector<int>& Sizes(std::size_t sample) const { return sizes_[sample]; }
  const PackedTree& tree() const { return tree_; }
  const std::vector<NodeAgg>& aggs() const { return aggs_; }

  // Sample ids whose coordinates fall inside `box`, ascending.
  std::vector<std::size_t> RangeSamples(const PivotBox& box) const;

  // Samples holding domain value `value_id` on `attr`, ascending.
  const std::vector<std::size_t>& Postings(int attr, int value_id) const {
    return postings_[attr][value_id];
  }

  // Exactly the samples satisfying every determinant of `rule` against r.
  // `rows[x]` caches distances from r's value on x to each domain value of x
  // and is filled on first use; keep it per tuple.
  std::vector<std::size_t> SupportingSamples(const CddRule& rule, const StreamTuple& r,
                                             std::vector<std::vector<double>>& rows) const;

 private:
  const Repository* repo_ = nullptr;
  DistanceFn dist_;
  std::vector<std::vector<std::vector<std::size_t>>> postings_;  // [attr][value id]
  std::vector<Converted> coords_;
  std::vector<KeywordMask> masks_;
  std::vector<std::vector<int>> sizes_;
  PackedTree tree_;
  std::vector<NodeAgg> aggs_;
};

}  // namespace terids
