#include <algorithm>
#include <chrono>
#include <tuple>

#include "terids/engine.h"

namespace terids {

std::vector<std::pair<StreamTuple, double>> AllInstances(const ImputedTuple& it) {
  std::vector<std::pair<StreamTuple, double>> out;
  const std::size_t d = it.candidates.size();
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    StreamTuple t = it.base;
    double p = 1.0;
    for (std::size_t x = 0; x < d; ++x) {
      t.attrs[x] = it.candidates[x][idx[x]].value;
      p *= it.candidates[x][idx[x]].prob;
    }
    out.emplace_back(std::move(t), p);
    std::size_t x = d;
    while (x > 0 && idx[x - 1] + 1 == it.candidates[x - 1].size()) idx[--x] = 0;
    if (x == 0) break;
    ++idx[x - 1];
  }
  return out;
}

Oracle::Oracle(Model model, QueryConfig cfg, EngineParams params)
    : model_(std::move(model)),
      cfg_(std::move(cfg)),
      params_(params),
      ctx_(*model_.repo, params_.dist),
      window_(cfg_.window_size) {
  rules_by_attr_.resize(model_.repo->dims());
  for (const auto& r : model_.rules) rules_by_attr_.at(r.dependent).push_back(r);
}

ImputedTuple Oracle::Impute(const StreamTuple& r) const {
  return ImputeByScan(r, rules_by_attr_, ctx_, params_.impute);
}

Oracle::Entry Oracle::MakeEntry(ImputedTuple it) const {
  Entry e;
  e.instances = AllInstances(it);
  for (const auto& [t, p] : e.instances) {
    char any = 0;
    for (const auto& v : t.attrs) any = any || ContainsKeyword(*v, cfg_.keywords);
    e.topical.push_back(any);
  }
  e.it = std::move(it);
  return e;
}

double Oracle::EntryProbability(const Entry& a, const Entry& b) const {
  double total = 0.0;
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    for (std::size_t j = 0; j < b.instances.size(); ++j) {
      if (!a.topical[i] && !b.topical[j]) continue;
      if (TupleSim(a.instances[i].first, b.instances[j].first) > cfg_.gamma)
        total += a.instances[i].second * b.instances[j].second;
    }
  }
  return total;
}

double Oracle::PairProbability(const ImputedTuple& a, const ImputedTuple& b) const {
  return EntryProbability(MakeEntry(a), MakeEntry(b));
}

std::vector<Event> Oracle::Step(std::vector<StreamTuple> arrivals) {
  const auto t_step = std::chrono::steady_clock::now();
  std::sort(arrivals.begin(), arrivals.end(),
            [](const StreamTuple& a, const StreamTuple& b) { return a.stream_id < b.stream_id; });
  if (!arrivals.empty()) {
    const auto t = arrivals.front().arrival_time;
    if (clock_ && t <= *clock_) throw Error(ErrorCode::kOutOfOrderArrival, "time went backwards");
    clock_ = t;
  }
  const std::int64_t ts = clock_.value_or(0);

  // Evict first so that pairs are only formed inside the new window.
  std::vector<Event> events;
  for (auto& a : arrivals) {
    if (window_.Size(a.stream_id) == window_.capacity()) {
      const std::string old = window_.Contents(a.stream_id).front().rid;
      for (auto& [key, prob] : results_.RemoveTuple(old))
        events.push_back({ts, Event::Kind::kExpire, key.first, key.second, prob});
      live_.erase(old);
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) {
    return std::tie(x.rid_a, x.rid_b) < std::tie(y.rid_a, y.rid_b);
  });

  std::vector<Event> matches;
  for (auto& a : arrivals) {
    Entry e = MakeEntry(a.complete() ? AsImputed(a) : Impute(a));
    for (int s : window_.Streams()) {
      if (s == a.stream_id) continue;
      for (const auto& other : window_.Contents(s)) {
        if (!live_.count(other.rid)) continue;  // evicted this step, still queued
        ++counts_.generated;
        const double p = EntryProbability(live_.at(other.rid), e);
        if (p > cfg_.alpha + kAlphaTol) {
          ++counts_.by_stage[static_cast<int>(PruneStage::kNone)];
          results_.Add(other.rid, a.rid, p);
          auto key = MatchResultSet::Canonical(other.rid, a.rid);
          matches.push_back({ts, Event::Kind::kMatch, key.first, key.second, p});
        } else {
          ++counts_.by_stage[static_cast<int>(PruneStage::kInstanceLevel)];
        }
      }
    }
    window_.Advance(a);
    live_.emplace(a.rid, std::move(e));
  }
  std::sort(matches.begin(), matches.end(), [](const Event& x, const Event& y) {
    return std::tie(x.rid_a, x.rid_b) < std::tie(y.rid_a, y.rid_b);
  });
  events.insert(events.end(), matches.begin(), matches.end());
  StepTiming tm;
  tm.total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_step).count();
  timings_.push_back(tm);
  return events;
}

}  // namespace terids
