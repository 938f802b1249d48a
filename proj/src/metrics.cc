#include "terids/metrics.h"

#include <algorithm>

namespace terids {

Accuracy ScoreFromRates(double precision, double recall) {
  Accuracy a{precision, recall, 0.0};
  if (precision + recall > 0.0) a.f_score = 2.0 * precision * recall / (precision + recall);
  return a;
}

Accuracy Score(const PairSet& reported, const PairSet& truth) {
  if (reported.empty() && truth.empty()) return {1.0, 1.0, 1.0};
  std::size_t hit = 0;
  for (const auto& p : reported) hit += truth.count(p);
  const double precision = reported.empty() ? 0.0 : static_cast<double>(hit) / reported.size();
  const double recall = truth.empty() ? 0.0 : static_cast<double>(hit) / truth.size();
  return ScoreFromRates(precision, recall);
}

PairSet MatchedPairs(const std::vector<Event>& events) {
  PairSet out;
  for (const auto& e : events)
    if (e.kind == Event::Kind::kMatch) out.emplace(e.rid_a, e.rid_b);
  return out;
}

TimingSummary Summarize(const std::vector<StepTiming>& t) {
  TimingSummary s;
  if (t.empty()) return s;
  std::vector<double> totals;
  for (const auto& x : t) {
    totals.push_back(x.total);
    s.total += x.total;
    s.rule_selection += x.rule_selection;
    s.imputation += x.imputation;
    s.er += x.er;
  }
  s.mean = s.total / static_cast<double>(t.size());
  std::sort(totals.begin(), totals.end());
  const std::size_t n = totals.size();
  s.median = n % 2 ? totals[n / 2] : 0.5 * (totals[n / 2 - 1] + totals[n / 2]);
  return s;
}

double PruningPower(const StageCounts& c) {
  if (c.generated == 0) return 0.0;
  std::uint64_t pruned = 0;
  for (auto s : {PruneStage::kKeyword, PruneStage::kSimUbSize, PruneStage::kSimUbPivot,
                 PruneStage::kProbUb})
    pruned += c.by_stage[static_cast<int>(s)];
  return static_cast<double>(pruned) / static_cast<double>(c.generated);
}

nlohmann::json MetricsJson(Mode mode, const StageCounts& counts, const TimingSummary& timing,
                           const Accuracy* accuracy) {
  nlohmann::json j;
  j["schema"] = 1;
  j["mode"] = ModeName(mode);
  j["pairs_generated"] = counts.generated;
  nlohmann::json stages;
  for (int k = 0; k < kPruneStageCount; ++k) {
    const double frac = counts.generated
                            ? static_cast<double>(counts.by_stage[k]) / counts.generated
                            : 0.0;
    stages[PruneStageName(static_cast<PruneStage>(k))] = {{"pairs", counts.by_stage[k]},
                                                          {"fraction", frac}};
  }
  j["stages"] = stages;
  j["pruning_power"] = PruningPower(counts);
  j["timing"] = {{"steps_mean_s", timing.mean},
                 {"steps_median_s", timing.median},
                 {"total_s", timing.total},
                 {"rule_selection_s", timing.rule_selection},
                 {"imputation_s", timing.imputation},
                 {"er_s", timing.er}};
  if (accuracy)
    j["accuracy"] = {{"precision", accuracy->precision},
                     {"recall", accuracy->recall},
                     {"f_score", accuracy->f_score}};
  return j;
}

}  // namespace terids
