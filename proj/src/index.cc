#include "terids/index.h"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

namespace terids {
namespace {

constexpr double kSlack = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Tree-packing keys per constraint kind: missing uses the reserved -1,
// intervals sit beyond the [0,1] coordinate range.
constexpr double kMissingKey = -1.0;
constexpr double kIntervalKey = 2.0;

const AttrConstraint* FindConstraint(const CddRule& rule, int attr) {
  for (const auto& c : rule.determinants)
    if (c.attr == attr) return &c;
  return nullptr;
}

void Combinations(const std::vector<int>& attrs, std::size_t k, std::size_t start,
                  std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < attrs.size(); ++i) {
    cur.push_back(attrs[i]);
    Combinations(attrs, k, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

Converted ConvertTuple(const StreamTuple& r, const PivotSet& pivots, const DistanceFn& dist) {
  Converted out(r.dims());
  for (std::size_t x = 0; x < r.dims(); ++x)
    if (r.attrs[x]) out[x] = pivots.Convert(*r.attrs[x], static_cast<int>(x), dist);
  return out;
}

PivotBox PivotBox::Universal(const PivotSet& pivots) {
  PivotBox box;
  box.iv.resize(pivots.dims());
  for (int x = 0; x < pivots.dims(); ++x) box.iv[x].assign(pivots.Count(x), {-kInf, kInf});
  return box;
}

bool PivotBox::Contains(const Converted& c) const {
  for (std::size_t x = 0; x < iv.size(); ++x)
    for (std::size_t a = 0; a < iv[x].size(); ++a)
      if (!iv[x][a].Contains(c[x][a])) return false;
  return true;
}

PivotBox BoxForRule(const CddRule& rule, const Converted& r_conv, const PivotSet& pivots,
                    const DistanceFn&) {
  PivotBox box = PivotBox::Universal(pivots);
  for (const auto& c : rule.determinants) {
    if (c.IsMissing()) continue;
    const auto& q = r_conv[c.attr];
    // A constant forces s to carry r's value, so s sits on r's coordinates.
    const double reach =
        c.IsConstant() ? 0.0 : std::get<IntervalConstraint>(c.kind).eps_max;
    for (std::size_t a = 0; a < q.size(); ++a)
      box.iv[c.attr][a] = {q[a] - reach - kSlack, q[a] + reach + kSlack};
  }
  return box;
}

CddIndex::CddIndex(int dependent, std::vector<CddRule> rules, const PivotSet& pivots,
                   const DistanceFn& dist, std::size_t fanout)
    : dependent_(dependent), rules_(std::move(rules)) {
  for (const auto& rule : rules_)
    if (rule.dependent != dependent_)
      throw Error(ErrorCode::kConfigError, "rule with foreign dependent in CDD-index");

  const_coords_.resize(rules_.size());
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const_coords_[i].resize(pivots.dims());
    for (const auto& c : rules_[i].determinants)
      if (const auto* k = std::get_if<ConstantConstraint>(&c.kind))
        const_coords_[i][c.attr] = pivots.Convert(k->value, c.attr, dist);
  }

  // Greedy superset cover of distinct determinant sets, largest first.
  std::set<std::vector<int>> distinct;
  for (const auto& rule : rules_) distinct.insert(rule.DeterminantAttrs());
  std::vector<std::vector<int>> sets(distinct.begin(), distinct.end());
  std::stable_sort(sets.begin(), sets.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  std::map<std::vector<int>, std::size_t> group_of;
  for (const auto& s : sets) {
    std::size_t g = 0;
    for (; g < groups_.size(); ++g)
      if (std::includes(groups_[g].head.begin(), groups_[g].head.end(), s.begin(), s.end()))
        break;
    if (g == groups_.size()) groups_.push_back({s, {}, {}, {}});
    group_of[s] = g;
  }
  for (std::size_t i = 0; i < rules_.size(); ++i)
    groups_[group_of.at(rules_[i].DeterminantAttrs())].rules.push_back(static_cast<int>(i));

  for (auto& g : groups_) {
    const std::size_t h = g.head.size();
    std::vector<std::vector<double>> centers;
    for (int ri : g.rules) {
      std::vector<double> c(h);
      for (std::size_t k = 0; k < h; ++k) {
        const auto* con = FindConstraint(rules_[ri], g.head[k]);
        if (!con || con->IsMissing())
          c[k] = kMissingKey;
        else if (con->IsConstant())
          c[k] = const_coords_[ri][g.head[k]][0];
        else
          c[k] = kIntervalKey;
      }
      centers.push_back(std::move(c));
    }
    g.tree = BuildStrTree(centers, fanout);
    g.aggs.resize(g.tree.nodes.size());
    for (std::size_t n = 0; n < g.tree.nodes.size(); ++n) {
      const auto& node = g.tree.nodes[n];
      NodeAgg agg;
      agg.dims.resize(h);
      bool first = true;
      auto cover_const = [](DimAgg& dim, const std::vector<DistInterval>& iv) {
        if (!dim.has_constant) {
          dim.constant_cover = iv;
          dim.has_constant = true;
          return;
        }
        for (std::size_t a = 0; a < iv.size(); ++a) dim.constant_cover[a].Cover(iv[a]);
      };
      for (auto child : node.children) {
        if (node.leaf) {
          const int ri = g.rules[child];
          const auto& rule = rules_[ri];
          if (first) agg.dep_cover = rule.dep_interval; else agg.dep_cover.Cover(rule.dep_interval);
          for (std::size_t k = 0; k < h; ++k) {
            const auto* con = FindConstraint(rule, g.head[k]);
            if (!con || con->IsMissing()) {
              agg.dims[k].has_missing = true;
            } else if (con->IsInterval()) {
              agg.dims[k].has_interval = true;
            } else {
              std::vector<DistInterval> iv;
              for (double v : const_coords_[ri][g.head[k]]) iv.push_back({v, v});
              cover_const(agg.dims[k], iv);
            }
          }
        } else {
          const auto& sub = g.aggs[child];
          if (first) agg.dep_cover = sub.dep_cover; else agg.dep_cover.Cover(sub.dep_cover);
          for (std::size_t k = 0; k < h; ++k) {
            agg.dims[k].has_missing |= sub.dims[k].has_missing;
            agg.dims[k].has_interval |= sub.dims[k].has_interval;
            if (sub.dims[k].has_constant) cover_const(agg.dims[k], sub.dims[k].constant_cover);
          }
        }
        first = false;
      }
      g.aggs[n] = std::move(agg);
    }
  }

  std::set<int> all_attrs;
  for (const auto& g : groups_) all_attrs.insert(g.head.begin(), g.head.end());
  std::vector<int> attrs(all_attrs.begin(), all_attrs.end());
  const std::size_t levels = attrs.size();
  for (std::size_t k = 1; k <= levels; ++k) {
    if (levels > 12 && k > 2 && k < levels) continue;
    std::vector<std::vector<int>> level;
    std::vector<int> cur;
    Combinations(attrs, k, 0, cur, level);
    lattice_.push_back(std::move(level));
  }
}

const std::vector<double>& CddIndex::ConstantCoords(std::size_t rule, int attr) const {
  return const_coords_[rule][attr];
}

bool CddIndex::LeafAccepts(const CddRule& rule, const StreamTuple& r) const {
  for (const auto& c : rule.determinants) {
    if (c.IsMissing()) continue;
    const auto& v = r.attrs[c.attr];
    if (!v) return false;
    if (const auto* k = std::get_if<ConstantConstraint>(&c.kind))
      if (*v != k->value) return false;
  }
  return true;
}

std::vector<std::size_t> CddIndex::CandidateRules(const StreamTuple& r,
                                                  const Converted& r_conv) const {
  std::vector<std::size_t> out;
  last_visited_ = 0;
  for (const auto& g : groups_) {
    if (g.tree.empty()) continue;
    std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(g.tree.root)};
    while (!stack.empty()) {
      const auto n = stack.back();
      stack.pop_back();
      ++last_visited_;
      const auto& agg = g.aggs[n];
      bool pruned = false;
      for (std::size_t k = 0; k < g.head.size() && !pruned; ++k) {
        const int x = g.head[k];
        const auto& dim = agg.dims[k];
        if (!r.attrs[x]) {
          pruned = !dim.has_missing;
        } else if (!dim.has_missing && !dim.has_interval) {
          // Only constants below: r must sit on one of them.
          for (std::size_t a = 0; a < dim.constant_cover.size(); ++a) {
            const auto& iv = dim.constant_cover[a];
            const double q = r_conv[x][a];
            if (q < iv.lb - kSlack || q > iv.ub + kSlack) {
              pruned = true;
              break;
            }
          }
        }
      }
      if (pruned) continue;
      const auto& node = g.tree.nodes[n];
      if (node.leaf) {
        for (auto c : node.children) {
          const int ri = g.rules[c];
          if (LeafAccepts(rules_[ri], r)) out.push_back(static_cast<std::size_t>(ri));
        }
      } else {
        for (auto c : node.children) stack.push_back(c);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

DrIndex::DrIndex(const Repository& repo, const PivotSet& pivots,
                 std::span<const std::string> keywords, const DistanceFn& dist,
                 std::size_t fanout)
    : repo_(&repo), dist_(dist) {
  const int d = repo.dims();
  postings_.resize(d);
  for (int x = 0; x < d; ++x) postings_[x].resize(repo.Domain(x).size());
  for (std::size_t s = 0; s < repo.size(); ++s)
    for (int x = 0; x < d; ++x) postings_[x][repo.ValueId(s, x)].push_back(s);
  std::vector<std::vector<double>> centers;
  for (std::size_t s = 0; s < repo.size(); ++s) {
    const auto& sample = repo.samples()[s];
    coords_.push_back(ConvertTuple(sample, pivots, dist));
    KeywordMask m(keywords.size());
    std::vector<int> sz(d);
    for (int x = 0; x < d; ++x) {
      m.Or(MaskOf(*sample.attrs[x], keywords));
      sz[x] = static_cast<int>(sample.attrs[x]->size());
    }
    masks_.push_back(std::move(m));
    sizes_.push_back(std::move(sz));
    std::vector<double> c(d);
    for (int x = 0; x < d; ++x) c[x] = coords_.back()[x][0];
    centers.push_back(std::move(c));
  }
  tree_ = BuildStrTree(centers, fanout);
  aggs_.resize(tree_.nodes.size());
  for (std::size_t n = 0; n < tree_.nodes.size(); ++n) {
    const auto& node = tree_.nodes[n];
    NodeAgg agg;
    bool first = true;
    for (auto child : node.children) {
      if (node.leaf) {
        const auto& c = coords_[child];
        if (first) {
          agg.piv.resize(d);
          agg.sizes.resize(d);
          for (int x = 0; x < d; ++x) {
            for (double v : c[x]) agg.piv[x].push_back({v, v});
            agg.sizes[x] = {sizes_[child][x], sizes_[child][x]};
          }
        } else {
          for (int x = 0; x < d; ++x) {
            for (std::size_t a = 0; a < c[x].size(); ++a) agg.piv[x][a].Cover({c[x][a], c[x][a]});
            agg.sizes[x].min_size = std::min(agg.sizes[x].min_size, sizes_[child][x]);
            agg.sizes[x].max_size = std::max(agg.sizes[x].max_size, sizes_[child][x]);
          }
        }
        agg.keywords.Or(masks_[child]);
      } else {
        const auto& sub = aggs_[child];
        if (first) {
          agg.piv = sub.piv;
          agg.sizes = sub.sizes;
        } else {
          for (int x = 0; x < d; ++x) {
            for (std::size_t a = 0; a < sub.piv[x].size(); ++a) agg.piv[x][a].Cover(sub.piv[x][a]);
            agg.sizes[x].min_size = std::min(agg.sizes[x].min_size, sub.sizes[x].min_size);
            agg.sizes[x].max_size = std::max(agg.sizes[x].max_size, sub.sizes[x].max_size);
          }
        }
        agg.keywords.Or(sub.keywords);
      }
      first = false;
    }
    aggs_[n] = std::move(agg);
  }
}

std::vector<std::size_t> DrIndex::RangeSamples(const PivotBox& box) const {
  std::vector<std::size_t> out;
  if (tree_.empty()) return out;
  std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(tree_.root)};
  while (!stack.empty()) {
    const auto n = stack.back();
    stack.pop_back();
    const auto& agg = aggs_[n];
    bool hit = true;
    for (std::size_t x = 0; x < box.iv.size() && hit; ++x)
      for (std::size_t a = 0; a < box.iv[x].size() && hit; ++a)
        hit = agg.piv[x][a].Intersects(box.iv[x][a]);
    if (!hit) continue;
    const auto& node = tree_.nodes[n];
    if (node.leaf) {
      for (auto s : node.children)
        if (box.Contains(coords_[s])) out.push_back(s);
    } else {
      for (auto c : node.children) stack.push_back(c);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> DrIndex::SupportingSamples(const CddRule& rule, const StreamTuple& r,
                                                    std::vector<std::vector<double>>& rows) const {
  rows.resize(repo_->dims());
  auto row = [&](int x) -> const std::vector<double>& {
    auto& out = rows[x];
    if (out.empty() && !repo_->Domain(x).empty()) {
      const auto& dom = repo_->Domain(x);
      out.resize(dom.size());
      for (std::size_t v = 0; v < dom.size(); ++v) out[v] = dist_(*r.attrs[x], dom[v]);
    }
    return out;
  };
  std::vector<const AttrConstraint*> dets;
  for (const auto& c : rule.determinants) {
    if (c.IsMissing()) continue;
    if (!r.attrs[c.attr])
      throw Error(ErrorCode::kDeterminantMissing,
                  "tuple " + r.rid + " lacks determinant " + std::to_string(c.attr));
    dets.push_back(&c);
  }
  if (dets.empty()) {
    std::vector<std::size_t> all(repo_->size());
    for (std::size_t s = 0; s < all.size(); ++s) all[s] = s;
    return all;
  }

  // Admitted domain values per determinant; the smallest posting union seeds the scan.
  std::vector<std::vector<char>> admit(dets.size());
  std::size_t best = 0, best_size = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const auto& c = *dets[i];
    const auto& dom = repo_->Domain(c.attr);
    admit[i].assign(dom.size(), 0);
    std::size_t n = 0;
    if (const auto* k = std::get_if<ConstantConstraint>(&c.kind)) {
      if (*r.attrs[c.attr] != k->value) return {};
      if (auto id = repo_->FindValue(c.attr, k->value)) {
        admit[i][*id] = 1;
        n = postings_[c.attr][*id].size();
      }
    } else {
      const auto& iv = std::get<IntervalConstraint>(c.kind);
      const auto& dr = row(c.attr);
      for (std::size_t v = 0; v < dom.size(); ++v)
        if (iv.Admits(dr[v])) {
          admit[i][v] = 1;
          n += postings_[c.attr][v].size();
        }
    }
    if (n < best_size) best = i, best_size = n;
  }
  std::vector<std::size_t> out;
  const int seed_attr = dets[best]->attr;
  for (std::size_t v = 0; v < admit[best].size(); ++v) {
    if (!admit[best][v]) continue;
    for (std::size_t s : postings_[seed_attr][v]) {
      bool ok = true;
      for (std::size_t i = 0; i < dets.size() && ok; ++i)
        ok = admit[i][repo_->ValueId(s, dets[i]->attr)];
      if (ok) out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace terids
