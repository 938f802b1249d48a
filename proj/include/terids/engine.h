#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "terids/cdd.h"
#include "terids/grid.h"
#include "terids/impute.h"
#include "terids/index.h"
#include "terids/metric.h"
#include "terids/model.h"
#include "terids/pivot.h"
#include "terids/prune.h"

namespace terids {

enum class Mode { kEngine, kNoIndex, kOracle };
const char* ModeName(Mode m);
// Throws kConfigError on unknown names.
Mode ParseMode(std::string_view name);

struct EngineParams {
  DetectParams detect;
  PivotParams pivots;
  ImputeOptions impute;
  std::size_t instance_limit = 4096;
  double cell_width = 0.1;
  DistanceFn dist;
};

struct Event {
  enum class Kind { kMatch, kExpire };
  std::int64_t ts = 0;
  Kind kind = Kind::kMatch;
  std::string rid_a, rid_b;  // rid_a < rid_b
  double prob = 0.0;

  bool operator==(const Event&) const = default;
};

// Matching pairs keyed canonically, with per-rid adjacency for eviction.
class MatchResultSet {
 public:
  using Key = std::pair<std::string, std::string>;

  static Key Canonical(const std::string& a, const std::string& b);
  void Add(const std::string& a, const std::string& b, double prob);
  // Removes every pair touching `rid`; returns them in key order.
  std::vector<std::pair<Key, double>> RemoveTuple(const std::string& rid);

  bool Contains(const std::string& a, const std::string& b) const;
  std::size_t size() const { return pairs_.size(); }
  const std::map<Key, double>& pairs() const { return pairs_; }
  bool Involves(const std::string& rid) const { return adj_.count(rid) > 0; }

 private:
  std::map<Key, double> pairs_;
  std::unordered_map<std::string, std::set<std::string>> adj_;
};

// Per-run tallies: generated cross-stream pairs and where each was settled.
struct StageCounts {
  std::uint64_t generated = 0;
  std::array<std::uint64_t, kPruneStageCount> by_stage{};  // kNone counts matches
};

struct StepTiming {
  double rule_selection = 0;  // seconds
  double imputation = 0;
  double er = 0;
  double total = 0;
};

// Offline artifacts: repository, rules and pivots.
struct Model {
  std::shared_ptr<const Repository> repo;
  std::vector<CddRule> rules;
  PivotSet pivots;
};

// Selects pivots and detects CDDs.
Model Precompute(Repository repo, const EngineParams& params);

class Processor {
 public:
  virtual ~Processor() = default;

  // Processes one timestamp. At most one arrival per stream, all sharing an
  // arrival time later than every earlier step. Returns expire events then
  // match events, each group in key order.
  virtual std::vector<Event> Step(std::vector<StreamTuple> arrivals) = 0;

  virtual const MatchResultSet& results() const = 0;
  virtual const StageCounts& counts() const = 0;
  virtual const std::vector<StepTiming>& timings() const = 0;
};

// Indexed pipeline (kEngine) or the same cascade over linear scans
// (kNoIndex).
class Engine : public Processor {
 public:
  Engine(Model model, QueryConfig cfg, EngineParams params, Mode mode);

  std::vector<Event> Step(std::vector<StreamTuple> arrivals) override;
  const MatchResultSet& results() const override { return results_; }
  const StageCounts& counts() const override { return counts_; }
  const std::vector<StepTiming>& timings() const override { return timings_; }

  // Imputation through the index join (kEngine) or scans (kNoIndex).
  ImputedTuple Impute(const StreamTuple& r, StepTiming* timing = nullptr) const;

  const ErGrid& grid() const { return grid_; }
  const PivotSet& pivots() const { return model_.pivots; }
  const CddIndex& cdd_index(int attr) const { return cdd_indexes_[attr]; }
  const DrIndex& dr_index() const { return dr_index_; }
  // Rids currently in the window of `stream`, oldest first.
  std::vector<std::string> WindowOf(int stream) const;

 private:
  Model model_;
  QueryConfig cfg_;
  EngineParams params_;
  Mode mode_;
  std::vector<std::string> keyword_list_;
  ImputeContext ctx_;
  std::vector<std::vector<CddRule>> rules_by_attr_;
  std::vector<CddIndex> cdd_indexes_;
  DrIndex dr_index_;
  ErGrid grid_;
  std::map<int, std::deque<std::string>> windows_;
  std::unordered_map<std::string, PreparedTuple> live_;
  std::optional<std::int64_t> clock_;
  MatchResultSet results_;
  StageCounts counts_;
  std::vector<StepTiming> timings_;
};

// Direct evaluation: linear-scan imputation and exhaustive instance-pair
// sums over every cross-stream window pair.
class Oracle : public Processor {
 public:
  Oracle(Model model, QueryConfig cfg, EngineParams params);

  std::vector<Event> Step(std::vector<StreamTuple> arrivals) override;
  const MatchResultSet& results() const override { return results_; }
  const StageCounts& counts() const override { return counts_; }
  const std::vector<StepTiming>& timings() const override { return timings_; }

  ImputedTuple Impute(const StreamTuple& r) const;
  // Exhaustive Pr over all instance pairs.
  double PairProbability(const ImputedTuple& a, const ImputedTuple& b) const;

 private:
  struct Entry {
    ImputedTuple it;
    std::vector<std::pair<StreamTuple, double>> instances;
    std::vector<char> topical;  // per instance
  };
  Entry MakeEntry(ImputedTuple it) const;
  double EntryProbability(const Entry& a, const Entry& b) const;

  Model model_;
  QueryConfig cfg_;
  EngineParams params_;
  ImputeContext ctx_;
  std::vector<std::vector<CddRule>> rules_by_attr_;
  SlidingWindow window_;
  std::unordered_map<std::string, Entry> live_;
  std::optional<std::int64_t> clock_;
  MatchResultSet results_;
  StageCounts counts_;
  std::vector<StepTiming> timings_;
};

std::unique_ptr<Processor> MakeProcessor(Mode mode, Model model, QueryConfig cfg,
                                         EngineParams params);

// Groups the tuples of several streams into per-timestamp arrival batches,
// ascending by time.
std::vector<std::vector<StreamTuple>> BatchByTime(
    const std::vector<std::vector<StreamTuple>>& streams);

// Feeds every batch to `p` and concatenates the emitted events.
std::vector<Event> RunAll(Processor& p, const std::vector<std::vector<StreamTuple>>& batches);

// Every instance of `it` with its probability (full Cartesian product).
std::vector<std::pair<StreamTuple, double>> AllInstances(const ImputedTuple& it);

}  // namespace terids
