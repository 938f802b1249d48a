#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "terids/engine.h"

namespace terids {

using PairSet = std::set<std::pair<std::string, std::string>>;

struct Accuracy {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

// F = 2PR/(P+R), 0 when P+R = 0. Empty result and truth sets score 1.
Accuracy ScoreFromRates(double precision, double recall);
Accuracy Score(const PairSet& reported, const PairSet& truth);

// Every pair a match event ever reported.
PairSet MatchedPairs(const std::vector<Event>& events);

struct TimingSummary {
  double mean = 0, median = 0;
  double rule_selection = 0, imputation = 0, er = 0;  // totals, seconds
  double total = 0;
};
TimingSummary Summarize(const std::vector<StepTiming>& t);

// Fraction of generated pairs settled by each stage before refinement.
double PruningPower(const StageCounts& c);

nlohmann::json MetricsJson(Mode mode, const StageCounts& counts, const TimingSummary& timing,
                           const Accuracy* accuracy);

}  // namespace terids
