#include "terids/engine.h"

#include <algorithm>
#include <chrono>
#include <tuple>

namespace terids {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point from) {
  return std::chrono::duration<double>(Clock::now() - from).count();
}

}  // namespace

const char* ModeName(Mode m) {
  switch (m) {
    case Mode::kEngine: return "engine";
    case Mode::kNoIndex: return "noindex";
    case Mode::kOracle: return "oracle";
  }
  return "unknown";
}

Mode ParseMode(std::string_view name) {
  if (name == "engine") return Mode::kEngine;
  if (name == "noindex") return Mode::kNoIndex;
  if (name == "oracle") return Mode::kOracle;
  throw Error(ErrorCode::kConfigError, "unknown mode '" + std::string(name) + "'");
}

MatchResultSet::Key MatchResultSet::Canonical(const std::string& a, const std::string& b) {
  return a < b ? Key{a, b} : Key{b, a};
}

void MatchResultSet::Add(const std::string& a, const std::string& b, double prob) {
  pairs_[Canonical(a, b)] = prob;
  adj_[a].insert(b);
  adj_[b].insert(a);
}

std::vector<std::pair<MatchResultSet::Key, double>> MatchResultSet::RemoveTuple(
    const std::string& rid) {
  std::vector<std::pair<Key, double>> out;
  auto it = adj_.find(rid);
  if (it == adj_.end()) return out;
  for (const auto& other : it->second) {
    auto key = Canonical(rid, other);
    auto p = pairs_.find(key);
    out.emplace_back(key, p->second);
    pairs_.erase(p);
    auto o = adj_.find(other);
    o->second.erase(rid);
    if (o->second.empty()) adj_.erase(o);
  }
  adj_.erase(rid);
  std::sort(out.begin(), out.end());
  return out;
}

bool MatchResultSet::Contains(const std::string& a, const std::string& b) const {
  return pairs_.count(Canonical(a, b)) > 0;
}

Model Precompute(Repository repo, const EngineParams& params) {
  Model m;
  auto shared = std::make_shared<Repository>(std::move(repo));
  m.pivots = SelectPivots(*shared, params.pivots, params.dist);
  m.rules = DetectCdds(*shared, params.detect, params.dist);
  m.repo = std::move(shared);
  return m;
}

Engine::Engine(Model model, QueryConfig cfg, EngineParams params, Mode mode)
    : model_(std::move(model)),
      cfg_(std::move(cfg)),
      params_(params),
      mode_(mode),
      keyword_list_(cfg_.KeywordList()),
      ctx_(*model_.repo, params_.dist),
      grid_(cfg_.dims, params_.cell_width) {
  if (mode_ == Mode::kOracle) throw Error(ErrorCode::kConfigError, "use Oracle for oracle mode");
  const int d = model_.repo->dims();
  if (d != cfg_.dims) throw Error(ErrorCode::kConfigError, "repository arity differs from config");
  if (model_.pivots.dims() != d) throw Error(ErrorCode::kConfigError, "pivot arity mismatch");
  rules_by_attr_.resize(d);
  for (const auto& r : model_.rules) {
    ValidateRule(r);
    if (r.dependent < 0 || r.dependent >= d)
      throw Error(ErrorCode::kConfigError, "rule dependent out of range");
    rules_by_attr_[r.dependent].push_back(r);
  }
  if (mode_ == Mode::kEngine) {
    for (int j = 0; j < d; ++j)
      cdd_indexes_.emplace_back(j, rules_by_attr_[j], model_.pivots, params_.dist);
    dr_index_ = DrIndex(*model_.repo, model_.pivots, keyword_list_, params_.dist);
  }
}

std::vector<std::string> Engine::WindowOf(int stream) const {
  auto it = windows_.find(stream);
  if (it == windows_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

ImputedTuple Engine::Impute(const StreamTuple& r, StepTiming* timing) const {
  if (r.complete()) return AsImputed(r);
  if (mode_ == Mode::kNoIndex) {
    auto t0 = Clock::now();
    auto it = ImputeByScan(r, rules_by_attr_, ctx_, params_.impute);
    if (timing) timing->imputation += Seconds(t0);
    return it;
  }
  ImputedTuple it;
  it.base = r;
  it.fallback.assign(r.dims(), false);
  it.candidates.resize(r.dims());
  const Converted conv = ConvertTuple(r, model_.pivots, params_.dist);
  std::vector<std::vector<double>> rows;
  for (std::size_t j = 0; j < r.dims(); ++j) {
    if (r.attrs[j]) {
      it.candidates[j] = {Candidate{*r.attrs[j], 1.0}};
      continue;
    }
    auto t0 = Clock::now();
    const auto& idx = cdd_indexes_[j];
    auto ids = idx.CandidateRules(r, conv);
    if (timing) timing->rule_selection += Seconds(t0);

    auto t1 = Clock::now();
    std::vector<CandidateDistribution> dists;
    for (auto id : ids) {
      const auto& rule = idx.rules()[id];
      auto samples = dr_index_.SupportingSamples(rule, r, rows);
      try {
        dists.push_back(ImputeSingleRuleOver(r, rule, ctx_, samples));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNoSupportingSample) throw;
      }
    }
    it.candidates[j] = CombineDistributions(dists);
    if (it.candidates[j].empty()) {
      it.candidates[j] =
          FallbackCandidates(*model_.repo, static_cast<int>(j), params_.impute.fallback_k);
      it.fallback[j] = true;
    }
    if (timing) timing->imputation += Seconds(t1);
  }
  return it;
}

std::vector<Event> Engine::Step(std::vector<StreamTuple> arrivals) {
  const auto t_step = Clock::now();
  StepTiming tm;
  std::sort(arrivals.begin(), arrivals.end(),
            [](const StreamTuple& a, const StreamTuple& b) { return a.stream_id < b.stream_id; });
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    const auto& a = arrivals[i];
    if (i > 0 && arrivals[i - 1].stream_id == a.stream_id)
      throw Error(ErrorCode::kConfigError, "two arrivals for stream " + std::to_string(a.stream_id));
    if (a.arrival_time != arrivals.front().arrival_time)
      throw Error(ErrorCode::kOutOfOrderArrival, "arrivals of one step differ in time");
    if (static_cast<int>(a.dims()) != cfg_.dims)
      throw Error(ErrorCode::kConfigError, "tuple " + a.rid + " has wrong arity");
    if (live_.count(a.rid)) throw Error(ErrorCode::kDuplicateTuple, "tuple " + a.rid + " already live");
  }
  if (!arrivals.empty()) {
    const auto t = arrivals.front().arrival_time;
    if (clock_ && t <= *clock_)
      throw Error(ErrorCode::kOutOfOrderArrival,
                  "time " + std::to_string(t) + " after " + std::to_string(*clock_));
    clock_ = t;
  }

  std::vector<Event> events;
  const std::int64_t ts = clock_.value_or(0);
  for (const auto& a : arrivals) {
    auto& w = windows_[a.stream_id];
    if (w.size() < cfg_.window_size) continue;
    const std::string old = w.front();
    w.pop_front();
    if (mode_ == Mode::kEngine) grid_.Evict(old);
    live_.erase(old);
    for (auto& [key, prob] : results_.RemoveTuple(old))
      events.push_back({ts, Event::Kind::kExpire, key.first, key.second, prob});
  }
  std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) {
    return std::tie(x.rid_a, x.rid_b) < std::tie(y.rid_a, y.rid_b);
  });
  events.erase(std::unique(events.begin(), events.end()), events.end());

  std::vector<Event> matches;
  for (auto& a : arrivals) {
    ImputedTuple it = Impute(a, &tm);
    auto t_prep = Clock::now();
    PreparedTuple p = Prepare(std::move(it), model_.pivots, cfg_, params_.dist,
                              params_.instance_limit);
    tm.imputation += Seconds(t_prep);

    auto t_er = Clock::now();
    std::vector<std::string> cands;
    if (mode_ == Mode::kEngine) {
      GridQueryStats st;
      cands = grid_.Candidates(p.profile, a.stream_id, cfg_, &st);
      counts_.generated += st.considered;
      for (int k = 0; k < kPruneStageCount; ++k) counts_.by_stage[k] += st.pruned[k];
    } else {
      for (const auto& [s, w] : windows_) {
        if (s == a.stream_id) continue;
        cands.insert(cands.end(), w.begin(), w.end());
        counts_.generated += w.size();
      }
    }
    for (const auto& rid : cands) {
      const auto v = Cascade(live_.at(rid), p, cfg_);
      ++counts_.by_stage[static_cast<int>(v.pruned_by)];
      if (!v.match) continue;
      results_.Add(rid, a.rid, *v.prob);
      auto key = MatchResultSet::Canonical(rid, a.rid);
      matches.push_back({ts, Event::Kind::kMatch, key.first, key.second, *v.prob});
    }
    if (mode_ == Mode::kEngine) grid_.Insert(a.rid, a.stream_id, p.profile);
    tm.er += Seconds(t_er);

    windows_[a.stream_id].push_back(a.rid);
    live_.emplace(a.rid, std::move(p));
  }
  std::sort(matches.begin(), matches.end(), [](const Event& x, const Event& y) {
    return std::tie(x.rid_a, x.rid_b) < std::tie(y.rid_a, y.rid_b);
  });
  events.insert(events.end(), matches.begin(), matches.end());
  tm.total = Seconds(t_step);
  timings_.push_back(tm);
  return events;
}

std::unique_ptr<Processor> MakeProcessor(Mode mode, Model model, QueryConfig cfg,
                                         EngineParams params) {
  if (mode == Mode::kOracle)
    return std::make_unique<Oracle>(std::move(model), std::move(cfg), params);
  return std::make_unique<Engine>(std::move(model), std::move(cfg), params, mode);
}

std::vector<std::vector<StreamTuple>> BatchByTime(
    const std::vector<std::vector<StreamTuple>>& streams) {
  std::map<std::int64_t, std::vector<StreamTuple>> by_time;
  for (const auto& s : streams)
    for (const auto& t : s) by_time[t.arrival_time].push_back(t);
  std::vector<std::vector<StreamTuple>> out;
  for (auto& [t, batch] : by_time) out.push_back(std::move(batch));
  return out;
}

std::vector<Event> RunAll(Processor& p, const std::vector<std::vector<StreamTuple>>& batches) {
  std::vector<Event> out;
  for (const auto& b : batches) {
    auto ev = p.Step(b);
    out.insert(out.end(), std::make_move_iterator(ev.begin()), std::make_move_iterator(ev.end()));
  }
  return out;
}

}  // namespace terids
