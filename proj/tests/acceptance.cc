// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "fixtures.h"
#include "harness.h"
#include "invariants.h"
#include "scenarios.h"
#include "terids/engine.h"
#include "terids/grid.h"
#include "terids/impute.h"
#include "terids/index.h"
#include "terids/metrics.h"
#include "terids/pivot.h"
#include "terids/prune.h"

using namespace terids;
using namespace terids::testing;

namespace {

constexpr double kExactTol = 1e-9;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failed checks into a detail string.
class Checker {
 public:
  void Expect(bool ok, const std::string& what) {
    if (ok) return;
    pass_ = false;
    if (fails_++ < 3) os_ << what << "; ";
  }
  void Near(double got, double want, double tol, const std::string& what) {
    std::ostringstream m;
    m.precision(12);
    m << what << " = " << got << ", want " << want;
    Expect(std::abs(got - want) <= tol, m.str());
  }
  Outcome Done(const std::string& summary) const {
    std::ostringstream os;
    os << summary;
    if (!pass_) os << "; failures " << fails_ << ": " << os_.str();
    return {pass_, os.str()};
  }

 private:
  bool pass_ = true;
  int fails_ = 0;
  std::ostringstream os_;
};

TupleProfile Profile(std::vector<SizeInterval> sizes, std::vector<DistInterval> piv) {
  TupleProfile p;
  p.sizes = std::move(sizes);
  for (const auto& iv : piv) p.piv.push_back({iv});
  return p;
}

Outcome ExampleValues() {
  Checker c;
  Repository repo = NumericRepo();
  ImputeContext ctx(repo, kAbs);
  const auto r = Tuple("r", {V("a1"), V("0.3"), std::nullopt});

  const CandidateDistribution one[] = {ImputeSingleRule(r, Cdd1(), ctx)};
  std::map<std::string, double> single;
  for (const auto& cand : CombineDistributions(one)) single[cand.value.Join()] = cand.prob;
  c.Expect(single.size() == 2, "single-rule candidate count");
  c.Near(single["0.1"], 2.0 / 4, kExactTol, "single-rule P(0.1)");
  c.Near(single["0.2"], 2.0 / 4, kExactTol, "single-rule P(0.2)");

  const CddRule rules[] = {Cdd1(), Cdd2()};
  std::map<std::string, double> multi;
  for (const auto& cand : ImputeMultiRule(r, rules, ctx)) multi[cand.value.Join()] = cand.prob;
  c.Expect(multi.size() == 3, "multi-rule candidate count");
  c.Near(multi["0.1"], 2.0 / 6, kExactTol, "multi-rule P(0.1)");
  c.Near(multi["0.2"], 3.0 / 6, kExactTol, "multi-rule P(0.2)");
  c.Near(multi["0.35"], 1.0 / 6, kExactTol, "multi-rule P(0.35)");

  auto a = Profile({{10, 10}, {7, 7}, {5, 7}}, {{0, 1}, {0, 1}, {0, 1}});
  auto b = Profile({{8, 8}, {10, 10}, {10, 12}}, {{0, 1}, {0, 1}, {0, 1}});
  c.Near(SimUbSize(a, b), 2.2, kExactTol, "size bound");
  auto x = Profile({{1, 9}, {1, 9}, {1, 9}}, {{0.3, 0.3}, {0.3, 0.3}, {0.1, 0.2}});
  auto y = Profile({{1, 9}, {1, 9}, {1, 9}}, {{0.7, 0.7}, {0.8, 0.8}, {0.7, 0.9}});
  c.Near(SimUbPivot(x, y), 1.6, kExactTol, "pivot bound");
  c.Near(ProbUbFromMoments({0.7, 1.2, 0.3, 1.1, 1.1, 1.3}, 3, 2.8), 0.82, kExactTol,
         "probability bound");
  return c.Done("probabilities 2/4 2/4, 2/6 3/6 1/6; bounds 2.2 1.6 0.82 within 1e-9");
}

Outcome OracleEquivalence() {
  Checker c;
  const std::size_t windows[] = {50, 100, 200};
  const double rates[] = {0.1, 0.3, 0.5};
  std::size_t steps = 0, matches = 0, incomplete = 0;
  int with_matches = 0;
  const int kWorkloads = 20;
  for (int i = 0; i < kWorkloads; ++i) {
    Workload w;
    w.gen.streams = 2 + i % 2;
    w.gen.dims = 3 + (i / 2) % 2;
    w.gen.length = 300;
    w.gen.vocab = 60;
    w.gen.topics = 3;
    w.gen.repo_size = 400;
    w.gen.seed = 100 + static_cast<std::uint64_t>(i);
    w.window = windows[i % 3];
    w.missing_rate = rates[(i / 3) % 3];
    w.missing_attrs = 1 + (i / 5) % 2;
    const Comparison cmp = CompareModes(w, kExactTol);
    const std::string tag = "workload " + std::to_string(i) + " ";
    c.Expect(cmp.engine_diff.empty(), tag + "engine: " + cmp.engine_diff);
    c.Expect(cmp.noindex_diff.empty(), tag + "noindex: " + cmp.noindex_diff);
    c.Expect(!cmp.cap_binding, tag + "instance cap reached");
    with_matches += cmp.matches > 0;
    steps += cmp.steps;
    matches += cmp.matches;
    incomplete += cmp.incomplete;
  }
  c.Expect(with_matches >= kWorkloads * 3 / 4, "too many workloads without matches");
  std::ostringstream os;
  os << kWorkloads << " workloads (" << with_matches << " with matches), " << steps << " steps, " << matches << " oracle matches, "
     << incomplete << " incomplete tuples; events and results equal within 1e-9";
  return c.Done(os.str());
}

Outcome PruningSoundness() {
  Checker c;
  std::uint64_t pairs = 0, pruned = 0, matches = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    const int d = 3 + static_cast<int>(seed % 2);
    const int vocab = 6 + static_cast<int>(seed % 4) * 2;
    std::vector<StreamTuple> samples;
    for (int i = 0; i < 40; ++i) {
      std::vector<AttributeValue> attrs;
      for (int x = 0; x < d; ++x) attrs.emplace_back(RandomSet(rng, vocab, 4));
      samples.push_back(Tuple("s" + std::to_string(i), attrs));
    }
    Repository repo(samples);
    PivotParams pp;
    pp.entropy_min = seed % 2 ? 1.5 : 3.0;
    PivotSet ps = SelectPivots(repo, pp, kJac);
    for (int trial = 0; trial < 1100; ++trial) {
      const double rho = 0.2 + 0.1 * static_cast<double>(rng() % 6);
      const double alpha = 0.1 * static_cast<double>(rng() % 9);
      auto cfg = QueryConfig::Make({"t0", "t1"}, d, rho, alpha, 10);
      auto a = RandomImputed(rng, d, vocab);
      auto b = RandomImputed(rng, d, vocab);
      const Exhaustive ex = Evaluate(a, b, cfg);
      const auto pa = Prepare(a, ps, cfg, kJac, 4096);
      const auto pb = Prepare(b, ps, cfg, kJac, 4096);
      ++pairs;
      const bool truth = ex.prob > cfg.alpha + kAlphaTol;
      matches += truth;
      c.Expect(ex.max_sim <= SimUbSize(pa.profile, pb.profile) + 1e-12, "size bound below sim");
      c.Expect(ex.max_sim <= SimUbPivot(pa.profile, pb.profile) + 1e-12, "pivot bound below sim");
      c.Expect(ex.prob == 0.0 || ex.prob <= ProbUb(pa.profile, pb.profile, d, cfg.gamma) + 1e-12,
               "probability bound below probability");
      if (truth) {
        c.Expect(!KeywordPrune(pa.profile, pb.profile), "keyword pruning dismissed a match");
        c.Expect(!SimUbPrune(pa.profile, pb.profile, cfg.gamma), "similarity pruning dismissed a match");
      }
      const auto v = Cascade(pa, pb, cfg);
      if (v.pruned_by != PruneStage::kNone) ++pruned;
      c.Expect(v.match == truth, "cascade verdict differs from exhaustive evaluation");
      const auto full = Refine(pa, pb, cfg, {false, false});
      c.Expect(std::abs(*full.prob - ex.prob) <= kExactTol, "refined probability differs");
    }
  }
  c.Expect(pairs >= 10000, "fewer than 10000 pairs");
  std::ostringstream os;
  os << pairs << " pairs, " << matches << " true matches, " << pruned
     << " pruned; zero false dismissals, bounds dominate";
  return c.Done(os.str());
}

Outcome PruningPowerCheck() {
  Checker c;
  Workload w;
  Prepared p = PrepareWorkload(w);
  const double kw_share =
      static_cast<double>(w.gen.keyword_count) / static_cast<double>(w.gen.vocab);
  c.Expect(kw_share <= 0.2, "keywords cover more than 20% of the vocabulary");
  Engine e(p.model, p.cfg, w.params, Mode::kEngine);
  RunAll(e, p.batches);
  const StageCounts& sc = e.counts();
  const double power = PruningPower(sc);
  c.Expect(power >= 0.9, "pruning power below 0.9");
  const auto kw = sc.by_stage[static_cast<int>(PruneStage::kKeyword)];
  for (int s = 1; s < kPruneStageCount; ++s)
    if (static_cast<PruneStage>(s) != PruneStage::kNone)
      c.Expect(kw >= sc.by_stage[s], std::string("stage ") +
                                         PruneStageName(static_cast<PruneStage>(s)) +
                                         " prunes more than keyword");
  const auto j = MetricsJson(Mode::kEngine, sc, Summarize(e.timings()), nullptr);
  for (int s = 0; s < kPruneStageCount; ++s)
    c.Expect(j["stages"].contains(PruneStageName(static_cast<PruneStage>(s))),
             "metrics JSON lacks a stage fraction");
  std::ostringstream os;
  os.precision(4);
  os << "pairs " << sc.generated << ", pruning power " << power << " (min 0.9), keyword share "
     << static_cast<double>(kw) / static_cast<double>(sc.generated);
  return c.Done(os.str());
}

Outcome Speedup() {
  Checker c;
  Workload w;
  w.gen.dims = 4;
  w.window = 1000;
  w.missing_rate = 0.1;
  Prepared p = PrepareWorkload(w);
  Engine fast(p.model, p.cfg, w.params, Mode::kEngine);
  Engine slow(p.model, p.cfg, w.params, Mode::kNoIndex);
  const auto ef = RunAll(fast, p.batches);
  const auto es = RunAll(slow, p.batches);
  const std::string diff = DiffEvents(ef, es, 0.0);
  c.Expect(diff.empty(), "results differ: " + diff);
  c.Expect(DiffResults(fast.results(), slow.results(), 0.0).empty(), "final results differ");
  const double tf = Summarize(fast.timings()).mean;
  const double ts = Summarize(slow.timings()).mean;
  const double ratio = ts / tf;
  c.Expect(ratio >= 10.0, "speedup below 10x");
  std::ostringstream os;
  os.precision(4);
  os << "w=1000 d=4 missing 0.1, " << p.batches.size() << " steps; mean step engine " << tf * 1e3
     << " ms, noindex " << ts * 1e3 << " ms, ratio " << ratio << " (min 10); identical events";
  return c.Done(os.str());
}

Outcome PivotModel() {
  Checker c;
  PivotParams defaults;
  c.Expect(defaults.buckets == 10 && defaults.entropy_min == 1.5, "pivot defaults");
  int values = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed);
    Repository repo = RandomRepo(rng, 180, 3, 30);
    PivotSet ps = SelectPivots(repo, {}, kJac);
    for (int x = 0; x < 3; ++x) {
      c.Expect(repo.Domain(x).size() <= 200, "domain above 200 values");
      double best = -1.0;
      for (int buckets : {2, 5, 10}) {
        for (const auto& v : repo.Domain(x)) {
          const double h = Entropy(v, x, repo, buckets, kJac);
          c.Expect(h >= 0.0 && h <= std::log2(buckets) + 1e-12, "entropy outside [0, log2 P]");
          if (buckets == 10) best = std::max(best, h);
          ++values;
        }
      }
      c.Near(Entropy(ps.Main(x), x, repo, 10, kJac), best, 1e-12, "main pivot entropy");
    }
  }
  return c.Done("P=10 eMin=1.5 defaults; " + std::to_string(values) +
                " entropies within [0, log2 P]; main pivot is the argmax on 15 domains");
}

Outcome WindowSemantics() {
  Checker c;
  for (Mode mode : {Mode::kEngine, Mode::kNoIndex, Mode::kOracle}) {
    const std::string err = RunScript(mode);
    c.Expect(err.empty(), std::string(ModeName(mode)) + ": " + err);
  }
  return c.Done("w=3 trace, 7 timestamps, engine/noindex/oracle match scripted events");
}

Outcome StructuralInvariants() {
  Checker c;
  std::size_t ops = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    std::mt19937_64 rng(seed);
    Repository repo = RandomRepo(rng, 300, 4, 20);
    PivotSet ps = SelectPivots(repo, {}, kJac);
    for (int dep = 0; dep < 4; ++dep) {
      std::vector<CddRule> rules;
      for (int i = 0; i < 120; ++i) rules.push_back(RandomRule(rng, repo, dep));
      ops += rules.size();
      const std::string err = CheckCddIndex(CddIndex(dep, rules, ps, kJac));
      c.Expect(err.empty(), "CDD index: " + err);
    }
    const std::vector<std::string> kw{"t1", "t5"};
    ops += repo.size();
    const std::string err = CheckDrIndex(DrIndex(repo, ps, kw, kJac));
    c.Expect(err.empty(), "DR index: " + err);
  }

  std::mt19937_64 rng(5);
  Repository repo = RandomRepo(rng, 200, 3, 12);
  PivotSet ps = SelectPivots(repo, {}, kJac);
  auto cfg = QueryConfig::Make({"t1"}, 3, 0.5, 0.5, 10);
  ErGrid g(3, 0.1);
  std::vector<std::string> live;
  int next = 0, restores = 0;
  for (int op = 0; op < 1500; ++op, ++ops) {
    if (live.empty() || rng() % 5 < 3) {
      StreamTuple t = repo.samples()[rng() % repo.size()];
      t.rid = "r" + std::to_string(next++);
      ImputedTuple it = AsImputed(t);
      if (rng() % 2) it.candidates[rng() % 3].push_back({RandomSet(rng, 12, 3), 0.0});
      const auto prep = Prepare(it, ps, cfg, kJac, 64);
      const int stream = static_cast<int>(rng() % 3);
      if (op % 10 == 0) {
        const std::string before = g.Dump();
        g.Insert("probe", stream, prep.profile);
        g.Evict("probe");
        c.Expect(g.Dump() == before, "insert then evict changed the grid");
        ++restores;
      }
      g.Insert(t.rid, stream, prep.profile);
      live.push_back(t.rid);
    } else {
      const std::size_t k = rng() % live.size();
      g.Evict(live[k]);
      live.erase(live.begin() + static_cast<long>(k));
    }
    if (op % 25 == 0) {
      const std::string err = CheckGrid(g, live);
      c.Expect(err.empty(), "grid: " + err);
    }
  }
  const std::string err = CheckGrid(g, live);
  c.Expect(err.empty(), "grid: " + err);
  return c.Done(std::to_string(ops) + " build/insert/evict operations checked by descendant scans; " +
                std::to_string(restores) + " insert-then-evict restores exact");
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "example values", 1.0, ExampleValues},
      {2, "oracle equivalence", 120.0, OracleEquivalence},
      {3, "pruning soundness", 60.0, PruningSoundness},
      {4, "pruning power", 300.0, PruningPowerCheck},
      {5, "speedup", 300.0, Speedup},
      {6, "pivot model", 60.0, PivotModel},
      {7, "window semantics", 10.0, WindowSemantics},
      {8, "structural invariants", 60.0, StructuralInvariants},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = cr.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > cr.budget_s) {
      out.pass = false;
      out.detail += "; over the " + std::to_string(static_cast<int>(cr.budget_s)) + " s budget";
    }
    failed += !out.pass;
    std::printf("criterion %d %s: %s (%.2f s) %s\n", cr.id, cr.name, out.pass ? "PASS" : "FAIL",
                secs, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
