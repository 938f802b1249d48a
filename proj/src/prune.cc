#include "terids/prune.h"

#include <algorithm>
#include <queue>
#include <tuple>

namespace terids {

TupleProfile BuildProfile(const ImputedTuple& it, const PivotSet& pivots,
                          std::span<const std::string> keywords, const DistanceFn& dist) {
  const std::size_t d = it.candidates.size();
  TupleProfile p;
  p.keywords = KeywordMask(keywords.size());
  p.sizes.resize(d);
  p.piv.resize(d);
  p.expected.resize(d);
  for (std::size_t x = 0; x < d; ++x) {
    const auto& cands = it.candidates[x];
    const int n = pivots.Count(static_cast<int>(x));
    p.piv[x].assign(n, {0.0, 0.0});
    p.expected[x].assign(n, 0.0);
    bool first = true;
    for (const auto& c : cands) {
      p.keywords.Or(MaskOf(c.value, keywords));
      const int sz = static_cast<int>(c.value.size());
      auto conv = pivots.Convert(c.value, static_cast<int>(x), dist);
      if (first) {
        p.sizes[x] = {sz, sz};
        for (int a = 0; a < n; ++a) p.piv[x][a] = {conv[a], conv[a]};
      } else {
        p.sizes[x].min_size = std::min(p.sizes[x].min_size, sz);
        p.sizes[x].max_size = std::max(p.sizes[x].max_size, sz);
        for (int a = 0; a < n; ++a) p.piv[x][a].Cover({conv[a], conv[a]});
      }
      for (int a = 0; a < n; ++a) p.expected[x][a] += conv[a] * c.prob;
      first = false;
    }
  }
  return p;
}

void CoverProfile(TupleProfile& into, const TupleProfile& o) {
  if (into.sizes.empty()) {
    into.keywords = o.keywords;
    into.sizes = o.sizes;
    into.piv = o.piv;
    return;
  }
  into.keywords.Or(o.keywords);
  for (std::size_t x = 0; x < o.sizes.size(); ++x) {
    into.sizes[x].min_size = std::min(into.sizes[x].min_size, o.sizes[x].min_size);
    into.sizes[x].max_size = std::max(into.sizes[x].max_size, o.sizes[x].max_size);
    for (std::size_t a = 0; a < o.piv[x].size(); ++a) into.piv[x][a].Cover(o.piv[x][a]);
  }
}

bool ProfileCovers(const TupleProfile& outer, const TupleProfile& inner) {
  if (!outer.keywords.Covers(inner.keywords)) return false;
  for (std::size_t x = 0; x < inner.sizes.size(); ++x) {
    if (outer.sizes[x].min_size > inner.sizes[x].min_size ||
        outer.sizes[x].max_size < inner.sizes[x].max_size)
      return false;
    for (std::size_t a = 0; a < inner.piv[x].size(); ++a)
      if (outer.piv[x][a].lb > inner.piv[x][a].lb || outer.piv[x][a].ub < inner.piv[x][a].ub)
        return false;
  }
  return true;
}

bool KeywordPrune(const TupleProfile& a, const TupleProfile& b) {
  return !a.keywords.Any() && !b.keywords.Any();
}

double SimUbSize(const TupleProfile& a, const TupleProfile& b) {
  return UbSimBySize(a.sizes, b.sizes);
}

double SimUbPivot(const TupleProfile& a, const TupleProfile& b) {
  double sum = 0.0;
  for (std::size_t x = 0; x < a.piv.size(); ++x) {
    double best = 0.0;
    const std::size_t n = std::min(a.piv[x].size(), b.piv[x].size());
    for (std::size_t k = 0; k < n; ++k) best = std::max(best, MinDist(a.piv[x][k], b.piv[x][k]));
    sum += best;
  }
  return static_cast<double>(a.piv.size()) - sum;
}

bool SimUbPrune(const TupleProfile& a, const TupleProfile& b, double gamma) {
  return std::min(SimUbSize(a, b), SimUbPivot(a, b)) <= gamma - kGammaTol;
}

double ProbUbFromMoments(const PzInputs& in, int dims, double gamma) {
  const double slack = dims - gamma;
  auto branch = [&](double e_hi, double e_lo, double lb_hi, double ub_hi, double ub_lo,
                    double lb_lo) -> std::optional<double> {
    const double gap = e_hi - e_lo;
    if (gap <= 0.0 || lb_hi < ub_lo) return std::nullopt;
    const double theta = slack / gap;
    const double range = ub_hi - lb_lo;
    if (theta < 0.0 || theta > 1.0 || range <= 0.0) return std::nullopt;
    return 1.0 - (1.0 - theta) * (1.0 - theta) * (gap / range);
  };
  if (auto v = branch(in.ex, in.ey, in.lb_x, in.ub_x, in.ub_y, in.lb_y)) return *v;
  if (auto v = branch(in.ey, in.ex, in.lb_y, in.ub_y, in.ub_x, in.lb_x)) return *v;
  return 1.0;
}

double ProbUb(const TupleProfile& a, const TupleProfile& b, int dims, double gamma) {
  PzInputs in;
  for (std::size_t x = 0; x < a.piv.size(); ++x) {
    in.ex += a.expected[x][0];
    in.ey += b.expected[x][0];
    in.lb_x += a.piv[x][0].lb;
    in.ub_x += a.piv[x][0].ub;
    in.lb_y += b.piv[x][0].lb;
    in.ub_y += b.piv[x][0].ub;
  }
  return ProbUbFromMoments(in, dims, gamma);
}

const char* PruneStageName(PruneStage s) {
  switch (s) {
    case PruneStage::kKeyword: return "keyword";
    case PruneStage::kSimUbSize: return "simub_size";
    case PruneStage::kSimUbPivot: return "simub_pivot";
    case PruneStage::kProbUb: return "probub";
    case PruneStage::kInstanceLevel: return "instance";
    case PruneStage::kNone: return "none";
  }
  return "unknown";
}

PreparedTuple Prepare(ImputedTuple it, const PivotSet& pivots, const QueryConfig& cfg,
                      const DistanceFn& dist, std::size_t instance_limit) {
  PreparedTuple p;
  const auto kw = cfg.KeywordList();
  p.profile = BuildProfile(it, pivots, kw, dist);
  p.instances = ExpandInstances(it, instance_limit);
  p.has_keyword.resize(it.candidates.size());
  for (std::size_t x = 0; x < it.candidates.size(); ++x)
    for (const auto& c : it.candidates[x])
      p.has_keyword[x].push_back(ContainsKeyword(c.value, cfg.keywords) ? 1 : 0);
  for (const auto& inst : p.instances.instances) {
    char any = 0;
    for (std::size_t x = 0; x < inst.choice.size() && !any; ++x)
      any = p.has_keyword[x][inst.choice[x]];
    p.instance_keyword.push_back(any);
  }
  p.it = std::move(it);
  return p;
}

PairVerdict Refine(const PreparedTuple& a, const PreparedTuple& b, const QueryConfig& cfg,
                   const RefineOptions& opts) {
  const std::size_t d = a.it.candidates.size();
  const auto& ia = a.instances.instances;
  const auto& ib = b.instances.instances;
  PairVerdict v;
  if (ia.size() == 1 && ib.size() == 1 && !a.instances.truncated && !b.instances.truncated) {
    double acc = 0.0;
    if (a.instance_keyword[0] || b.instance_keyword[0]) {
      double sim = 0.0;
      for (std::size_t x = 0; x < d; ++x)
        sim += JaccardSim(a.it.candidates[x][ia[0].choice[x]].value,
                          b.it.candidates[x][ib[0].choice[x]].value);
      if (sim > cfg.gamma) acc = ia[0].prob * ib[0].prob;
    }
    v.prob = acc;
    v.match = acc > cfg.alpha + kAlphaTol;
    v.pruned_by = v.match ? PruneStage::kNone : PruneStage::kInstanceLevel;
    return v;
  }

  // sims[x][i * nb + j]: Jaccard of candidate i of a and candidate j of b.
  std::vector<std::vector<double>> sims(d);
  for (std::size_t x = 0; x < d; ++x) {
    const auto& ca = a.it.candidates[x];
    const auto& cb = b.it.candidates[x];
    sims[x].resize(ca.size() * cb.size());
    for (std::size_t i = 0; i < ca.size(); ++i)
      for (std::size_t j = 0; j < cb.size(); ++j)
        sims[x][i * cb.size() + j] = JaccardSim(ca[i].value, cb[j].value);
  }
  double acc = 0.0;
  double seen = 0.0;
  using Entry = std::tuple<double, std::size_t, std::size_t>;
  auto worse = [](const Entry& l, const Entry& r) {
    if (std::get<0>(l) != std::get<0>(r)) return std::get<0>(l) < std::get<0>(r);
    return std::tie(std::get<1>(l), std::get<2>(l)) > std::tie(std::get<1>(r), std::get<2>(r));
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  if (!ia.empty() && !ib.empty()) heap.emplace(ia[0].prob * ib[0].prob, 0, 0);
  while (!heap.empty()) {
    auto [p, i, j] = heap.top();
    heap.pop();
    if (j == 0 && i + 1 < ia.size()) heap.emplace(ia[i + 1].prob * ib[0].prob, i + 1, 0);
    if (j + 1 < ib.size()) heap.emplace(ia[i].prob * ib[j + 1].prob, i, j + 1);
    seen += p;
    if (a.instance_keyword[i] || b.instance_keyword[j]) {
      double sim = 0.0;
      for (std::size_t x = 0; x < d; ++x)
        sim += sims[x][ia[i].choice[x] * b.it.candidates[x].size() + ib[j].choice[x]];
      if (sim > cfg.gamma) acc += p;
    }
    if (opts.stop_on_match && acc > cfg.alpha + kAlphaTol) {
      v.pruned_by = PruneStage::kNone;
      v.prob = acc;
      v.match = true;
      return v;
    }
    if (opts.stop_on_prune && acc + std::max(0.0, 1.0 - seen) <= cfg.alpha) {
      v.pruned_by = PruneStage::kInstanceLevel;
      v.prob = acc;
      return v;
    }
  }
  v.prob = acc;
  v.match = acc > cfg.alpha + kAlphaTol;
  v.pruned_by = v.match ? PruneStage::kNone : PruneStage::kInstanceLevel;
  return v;
}

PairVerdict Cascade(const PreparedTuple& a, const PreparedTuple& b, const QueryConfig& cfg,
                    const RefineOptions& opts) {
  PairVerdict v;
  if (KeywordPrune(a.profile, b.profile)) {
    v.pruned_by = PruneStage::kKeyword;
    return v;
  }
  if (SimUbSize(a.profile, b.profile) <= cfg.gamma - kGammaTol) {
    v.pruned_by = PruneStage::kSimUbSize;
    return v;
  }
  if (SimUbPivot(a.profile, b.profile) <= cfg.gamma - kGammaTol) {
    v.pruned_by = PruneStage::kSimUbPivot;
    return v;
  }
  if (ProbUb(a.profile, b.profile, cfg.dims, cfg.gamma) <= cfg.alpha) {
    v.pruned_by = PruneStage::kProbUb;
    return v;
  }
  return Refine(a, b, cfg, opts);
}

}  // namespace terids
