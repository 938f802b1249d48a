#include "terids/impute.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <tuple>

namespace terids {

std::int64_t CandidateDistribution::Total() const {
  std::int64_t t = 0;
  for (const auto& [v, f] : freq) t += f;
  return t;
}

ImputeContext::ImputeContext(const Repository& repo, DistanceFn dist)
    : repo_(&repo), dist_(dist), rows_(repo.dims()) {
  for (int x = 0; x < repo.dims(); ++x) rows_[x].resize(repo.Domain(x).size());
}

const std::vector<double>& ImputeContext::DomainRow(int attr, int value_id) const {
  auto& row = rows_[attr][value_id];
  if (row.empty()) {
    const auto& dom = repo_->Domain(attr);
    row.resize(dom.size());
    for (std::size_t v = 0; v < dom.size(); ++v) row[v] = dist_(dom[value_id], dom[v]);
  }
  return row;
}

void ImputeContext::AddCandidates(const CddRule& rule, std::size_t sample,
                                  std::vector<std::int64_t>& counts) const {
  const int j = rule.dependent;
  const auto& row = DomainRow(j, repo_->ValueId(sample, j));
  for (std::size_t v = 0; v < row.size(); ++v)
    if (rule.dep_interval.Contains(row[v])) ++counts[v];
}

CandidateDistribution ImputeContext::ToDistribution(int attr,
                                                    std::span<const std::int64_t> counts) const {
  CandidateDistribution out;
  out.attr = attr;
  const auto& dom = repo_->Domain(attr);
  for (std::size_t v = 0; v < counts.size(); ++v)
    if (counts[v] > 0) out.freq.emplace(dom[v], counts[v]);
  return out;
}

CandidateDistribution ImputeSingleRuleOver(const StreamTuple& r, const CddRule& rule,
                                           const ImputeContext& ctx,
                                           std::span<const std::size_t> samples) {
  const auto& repo = ctx.repo();
  std::vector<std::int64_t> counts(repo.Domain(rule.dependent).size(), 0);
  bool supported = false;
  for (std::size_t s : samples) {
    if (!SatisfiesDeterminants(rule, r, repo.samples()[s], ctx.dist())) continue;
    supported = true;
    ctx.AddCandidates(rule, s, counts);
  }
  if (!supported)
    throw Error(ErrorCode::kNoSupportingSample, "no sample supports rule for " + r.rid);
  return ctx.ToDistribution(rule.dependent, counts);
}

CandidateDistribution ImputeSingleRule(const StreamTuple& r, const CddRule& rule,
                                       const ImputeContext& ctx) {
  std::vector<std::size_t> all(ctx.repo().size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return ImputeSingleRuleOver(r, rule, ctx, all);
}

std::vector<Candidate> CombineDistributions(std::span<const CandidateDistribution> dists) {
  std::map<TokenSet, std::int64_t> sum;
  std::int64_t total = 0;
  for (const auto& d : dists) {
    for (const auto& [v, f] : d.freq) {
      sum[v] += f;
      total += f;
    }
  }
  std::vector<Candidate> out;
  if (total == 0) return out;
  out.reserve(sum.size());
  for (const auto& [v, f] : sum)
    out.push_back({v, static_cast<double>(f) / static_cast<double>(total)});
  std::stable_sort(out.begin(), out.end(),
                   [](const Candidate& a, const Candidate& b) { return a.prob > b.prob; });
  return out;
}

std::vector<Candidate> ImputeMultiRule(const StreamTuple& r, std::span<const CddRule> rules,
                                       const ImputeContext& ctx) {
  std::vector<CandidateDistribution> dists;
  for (const auto& rule : rules) {
    if (!RuleApplicable(rule, r)) continue;
    try {
      dists.push_back(ImputeSingleRule(r, rule, ctx));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoSupportingSample) throw;
    }
  }
  auto out = CombineDistributions(dists);
  if (out.empty()) throw Error(ErrorCode::kImputationFailed, "no rule imputes " + r.rid);
  return out;
}

std::vector<Candidate> FallbackCandidates(const Repository& repo, int attr, std::size_t k) {
  const auto& counts = repo.DomainCounts(attr);
  if (counts.empty()) throw Error(ErrorCode::kEmptyDomain, "attribute has empty domain");
  std::vector<int> ids(counts.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) { return counts[a] > counts[b]; });
  ids.resize(std::min(k, ids.size()));
  std::vector<Candidate> out;
  for (int id : ids) out.push_back({repo.Domain(attr)[id], 1.0 / static_cast<double>(ids.size())});
  return out;
}

bool ImputedTuple::any_fallback() const {
  return std::any_of(fallback.begin(), fallback.end(), [](bool b) { return b; });
}

std::size_t ImputedTuple::InstanceCount() const {
  std::size_t n = 1;
  for (const auto& c : candidates) {
    if (c.size() > 0 && n > std::numeric_limits<std::size_t>::max() / c.size())
      return std::numeric_limits<std::size_t>::max();
    n *= c.size();
  }
  return n;
}

ImputedTuple AsImputed(const StreamTuple& complete) {
  if (!complete.complete())
    throw Error(ErrorCode::kIncompleteTuple, "tuple " + complete.rid + " has missing values");
  ImputedTuple it;
  it.base = complete;
  it.fallback.assign(complete.dims(), false);
  for (const auto& v : complete.attrs) it.candidates.push_back({Candidate{*v, 1.0}});
  return it;
}

ImputedTuple ImputeByScan(const StreamTuple& r,
                          std::span<const std::vector<CddRule>> rules_by_attr,
                          const ImputeContext& ctx, const ImputeOptions& opts) {
  ImputedTuple it;
  it.base = r;
  it.fallback.assign(r.dims(), false);
  it.candidates.resize(r.dims());
  for (std::size_t j = 0; j < r.dims(); ++j) {
    if (r.attrs[j]) {
      it.candidates[j] = {Candidate{*r.attrs[j], 1.0}};
      continue;
    }
    try {
      it.candidates[j] = ImputeMultiRule(r, rules_by_attr[j], ctx);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kImputationFailed) throw;
      it.candidates[j] = FallbackCandidates(ctx.repo(), static_cast<int>(j), opts.fallback_k);
      it.fallback[j] = true;
    }
  }
  return it;
}

InstanceSet ExpandInstances(const ImputedTuple& it, std::size_t limit) {
  if (limit < 1) throw Error(ErrorCode::kConfigError, "instance limit must be >= 1");
  const std::size_t d = it.candidates.size();
  InstanceSet out;

  // Enumeration runs over ranks in each attribute's descending-probability
  // order; `order` maps ranks back to candidate indices.
  std::vector<std::vector<int>> order(d);
  for (std::size_t k = 0; k < d; ++k) {
    const auto& cands = it.candidates[k];
    if (cands.empty()) throw Error(ErrorCode::kImputationFailed, "attribute has no candidates");
    order[k].resize(cands.size());
    std::iota(order[k].begin(), order[k].end(), 0);
    std::stable_sort(order[k].begin(), order[k].end(),
                     [&](int a, int b) { return cands[a].prob > cands[b].prob; });
  }
  auto prob_of = [&](const std::vector<int>& c) {
    double p = 1.0;
    for (std::size_t k = 0; k < d; ++k) p *= it.candidates[k][order[k][c[k]]].prob;
    return p;
  };
  // Max-heap on probability; ties resolved by lexicographically smaller choice.
  using Entry = std::pair<double, std::vector<int>>;
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  std::vector<int> start(d, 0);
  heap.emplace(prob_of(start), start);
  double kept = 0.0;
  while (!heap.empty()) {
    if (out.instances.size() == limit) {
      out.truncated = true;
      break;
    }
    auto [p, c] = heap.top();
    heap.pop();
    std::vector<int> choice(d);
    for (std::size_t k = 0; k < d; ++k) choice[k] = order[k][c[k]];
    out.instances.push_back({std::move(choice), p});
    kept += p;
    // Each choice vector has a unique parent: decrement its last nonzero
    // coordinate. Children therefore only bump coordinates at or after it.
    std::size_t last = 0;
    for (std::size_t k = 0; k < d; ++k)
      if (c[k] != 0) last = k;
    for (std::size_t k = last; k < d; ++k) {
      if (c[k] + 1 >= static_cast<int>(it.candidates[k].size())) continue;
      auto child = c;
      ++child[k];
      heap.emplace(prob_of(child), std::move(child));
    }
  }
  out.residual = out.truncated ? std::max(0.0, 1.0 - kept) : 0.0;
  return out;
}

StreamTuple Materialize(const ImputedTuple& it, const Instance& inst) {
  StreamTuple t = it.base;
  for (std::size_t k = 0; k < it.candidates.size(); ++k)
    t.attrs[k] = it.candidates[k][inst.choice[k]].value;
  return t;
}

}  // namespace terids
