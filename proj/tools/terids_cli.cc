// terids: command-line driver for topic-aware entity resolution over
// incomplete streams.

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "terids/engine.h"
#include "terids/io.h"
#include "terids/metrics.h"
#include "terids/synthetic.h"

namespace fs = std::filesystem;
using namespace terids;

namespace {

struct Options {
  std::string repo;
  std::vector<std::string> streams;
  std::string keywords;
  double alpha = 0.5;
  double rho = 0.5;
  std::size_t window = 1000;
  double missing_rate = 0.0;
  int missing_attrs = 1;
  double repo_ratio = 1.0;
  std::string mode = "engine";
  std::uint64_t seed = 1;
  std::size_t instance_cap = 4096;
  std::string rules_path, pivots_path;
  std::string out = "results.jsonl";
  std::string metrics = "metrics.json";
  bool with_truth = false;
  EngineParams params;
};

void AddModelOptions(CLI::App* app, Options& o) {
  app->add_option("--buckets", o.params.pivots.buckets, "entropy buckets P");
  app->add_option("--emin", o.params.pivots.entropy_min, "minimal joint entropy");
  app->add_option("--max-pivots", o.params.pivots.max_pivots, "pivots per attribute");
  app->add_option("--max-width", o.params.detect.max_interval_width, "widest rule interval");
  app->add_option("--min-support", o.params.detect.min_support, "pairs backing a rule");
  app->add_option("--max-det-distance", o.params.detect.max_determinant_distance,
                  "largest determinant distance a rule may constrain");
  app->add_option("--mine-samples", o.params.detect.max_samples, "samples used for mining (0 = all)");
  app->add_option("--repo-ratio", o.repo_ratio, "fraction of the repository used");
  app->add_option("--seed", o.seed, "seed for every random choice");
}

KeywordSet ParseKeywords(const std::string& csv) {
  KeywordSet out;
  std::stringstream ss(csv);
  std::string k;
  while (std::getline(ss, k, ','))
    if (!k.empty()) {
      const TokenSet toks = Tokenize(k);
      out.insert(toks.tokens().begin(), toks.tokens().end());
    }
  return out;
}

Repository LoadRepository(const Options& o) {
  RawTable t = ReadCsv(o.repo);
  if (o.repo_ratio < 1.0) t = SubsampleRows(t, o.repo_ratio, o.seed);
  return Repository(ToRepositoryTuples(t));
}

Model LoadModel(const Options& o) {
  Repository repo = LoadRepository(o);
  if (o.rules_path.empty() && o.pivots_path.empty()) return Precompute(std::move(repo), o.params);
  Model m;
  auto shared = std::make_shared<Repository>(std::move(repo));
  m.rules = o.rules_path.empty() ? DetectCdds(*shared, o.params.detect, o.params.dist)
                                 : ParseRules(ReadFile(o.rules_path));
  m.pivots = o.pivots_path.empty() ? SelectPivots(*shared, o.params.pivots, o.params.dist)
                                   : PivotSet::Parse(ReadFile(o.pivots_path), o.params.pivots);
  m.repo = std::move(shared);
  return m;
}

std::vector<std::vector<StreamTuple>> LoadStreams(const Options& o) {
  std::vector<std::vector<StreamTuple>> out;
  for (std::size_t s = 0; s < o.streams.size(); ++s) {
    RawTable t = ReadCsv(o.streams[s]);
    if (o.missing_rate > 0.0) t = InjectMissing(t, o.missing_rate, o.missing_attrs, o.seed + s);
    out.push_back(ToStreamTuples(t));
  }
  return out;
}

int RunVerb(const Options& o) {
  Model model = LoadModel(o);
  auto cfg = QueryConfig::Make(ParseKeywords(o.keywords), model.repo->dims(), o.rho, o.alpha,
                               o.window);
  EngineParams params = o.params;
  params.instance_limit = o.instance_cap;
  const auto batches = BatchByTime(LoadStreams(o));
  const Mode mode = ParseMode(o.mode);

  auto proc = MakeProcessor(mode, model, cfg, params);
  const auto events = RunAll(*proc, batches);
  std::string lines;
  for (const auto& e : events) lines += FormatEvent(e) + "\n";
  WriteFile(o.out, lines);

  Accuracy acc;
  const Accuracy* acc_ptr = nullptr;
  if (o.with_truth) {
    Oracle oracle(model, cfg, params);
    acc = Score(MatchedPairs(events), MatchedPairs(RunAll(oracle, batches)));
    acc_ptr = &acc;
  }
  auto j = MetricsJson(mode, proc->counts(), Summarize(proc->timings()), acc_ptr);
  WriteFile(o.metrics, j.dump(2) + "\n");
  std::cout << "events=" << events.size() << " live_pairs=" << proc->results().size()
            << " pruning_power=" << PruningPower(proc->counts()) << "\n";
  return 0;
}

struct BenchOptions {
  SyntheticParams gen;
  double missing_rate = 0.1;
  int missing_attrs = 1;
  double alpha = 0.5;
  double rho = 0.5;
  std::size_t window = 1000;
  bool oracle = false;
};

int BenchVerb(const BenchOptions& b, const Options& o) {
  const auto corpus = GenerateSynthetic(b.gen);
  RawTable repo_t = o.repo_ratio < 1.0 ? SubsampleRows(corpus.repository, o.repo_ratio, o.seed)
                                       : corpus.repository;
  Model model = Precompute(Repository(ToRepositoryTuples(repo_t)), o.params);
  KeywordSet kw(corpus.keywords.begin(), corpus.keywords.end());
  auto cfg = QueryConfig::Make(kw, b.gen.dims, b.rho, b.alpha, b.window);
  std::vector<std::vector<StreamTuple>> streams;
  for (std::size_t s = 0; s < corpus.streams.size(); ++s)
    streams.push_back(ToStreamTuples(
        InjectMissing(corpus.streams[s], b.missing_rate, b.missing_attrs, o.seed + s)));
  const auto batches = BatchByTime(streams);

  nlohmann::json out;
  out["schema"] = 1;
  out["rules"] = model.rules.size();
  std::vector<Mode> modes{Mode::kEngine, Mode::kNoIndex};
  if (b.oracle) modes.push_back(Mode::kOracle);
  std::vector<std::vector<Event>> all;
  for (Mode m : modes) {
    auto proc = MakeProcessor(m, model, cfg, o.params);
    all.push_back(RunAll(*proc, batches));
    out["runs"].push_back(MetricsJson(m, proc->counts(), Summarize(proc->timings()), nullptr));
  }
  bool same = true;
  for (std::size_t i = 1; i < all.size(); ++i) same = same && MatchedPairs(all[i]) == MatchedPairs(all[0]);
  out["identical_results"] = same;
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic-aware entity resolution over incomplete data streams"};
  app.require_subcommand(1);
  Options o;

  auto* detect = app.add_subcommand("detect", "mine CDD rules from a repository");
  detect->add_option("--repo", o.repo, "repository CSV")->required();
  detect->add_option("--out", o.out, "rules file")->required();
  AddModelOptions(detect, o);

  auto* pivots = app.add_subcommand("pivots", "select pivots from a repository");
  pivots->add_option("--repo", o.repo, "repository CSV")->required();
  pivots->add_option("--out", o.out, "pivots file")->required();
  AddModelOptions(pivots, o);

  std::string inject_in;
  auto* inject = app.add_subcommand("inject", "blank out attributes of a stream file");
  inject->add_option("--in", inject_in, "complete stream CSV")->required();
  inject->add_option("--out", o.out, "output CSV")->required();
  inject->add_option("--missing-rate", o.missing_rate, "fraction of tuples")->required();
  inject->add_option("--missing-attrs", o.missing_attrs, "attributes per tuple");
  inject->add_option("--seed", o.seed, "seed");

  auto* run = app.add_subcommand("run", "process streams and write results");
  run->add_option("--repo", o.repo, "repository CSV")->required();
  run->add_option("--stream", o.streams, "stream CSV, once per stream")->required();
  run->add_option("--keywords", o.keywords, "comma separated topic keywords")->required();
  run->add_option("--alpha", o.alpha, "probability threshold");
  run->add_option("--rho", o.rho, "similarity threshold per attribute");
  run->add_option("--window", o.window, "window size per stream");
  run->add_option("--missing-rate", o.missing_rate, "inject missing values first");
  run->add_option("--missing-attrs", o.missing_attrs, "attributes per injected tuple");
  run->add_option("--mode", o.mode, "engine, noindex or oracle");
  run->add_option("--instance-cap", o.instance_cap, "instances kept per tuple");
  run->add_option("--rules", o.rules_path, "rules file from `detect`");
  run->add_option("--pivots", o.pivots_path, "pivots file from `pivots`");
  run->add_option("--out", o.out, "results JSONL");
  run->add_option("--metrics", o.metrics, "metrics JSON");
  run->add_flag("--truth", o.with_truth, "score against an oracle run");
  AddModelOptions(run, o);

  SyntheticParams gen;
  std::string gen_dir = ".";
  auto* gencmd = app.add_subcommand("gen", "write a synthetic corpus");
  gencmd->add_option("--out-dir", gen_dir, "output directory");
  auto add_gen = [](CLI::App* a, SyntheticParams& g) {
    a->add_option("--dims", g.dims);
    a->add_option("--streams", g.streams);
    a->add_option("--length", g.length);
    a->add_option("--vocab", g.vocab);
    a->add_option("--topics", g.topics);
    a->add_option("--repo-size", g.repo_size);
    a->add_option("--keyword-count", g.keyword_count);
    a->add_option("--categories", g.categories);
    a->add_option("--max-value-size", g.max_value_size);
    a->add_option("--variants", g.variants);
    a->add_option("--common-share", g.common_share);
    a->add_option("--common-rate", g.common_rate);
    a->add_option("--noise", g.noise);
    a->add_option("--duplicate-rate", g.duplicate_rate);
  };
  add_gen(gencmd, gen);
  gencmd->add_option("--seed", gen.seed);

  BenchOptions bench;
  auto* benchcmd = app.add_subcommand("bench", "compare modes on a synthetic workload");
  add_gen(benchcmd, bench.gen);
  benchcmd->add_option("--missing-rate", bench.missing_rate);
  benchcmd->add_option("--missing-attrs", bench.missing_attrs);
  benchcmd->add_option("--alpha", bench.alpha);
  benchcmd->add_option("--rho", bench.rho);
  benchcmd->add_option("--window", bench.window);
  benchcmd->add_flag("--oracle", bench.oracle, "also run the oracle");
  AddModelOptions(benchcmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*detect) {
      Repository repo = LoadRepository(o);
      auto rules = DetectCdds(repo, o.params.detect, o.params.dist);
      WriteFile(o.out, SerializeRules(rules));
      std::cout << rules.size() << " rules\n";
    } else if (*pivots) {
      Repository repo = LoadRepository(o);
      WriteFile(o.out, SelectPivots(repo, o.params.pivots, o.params.dist).Serialize());
    } else if (*inject) {
      WriteCsv(o.out, InjectMissing(ReadCsv(inject_in), o.missing_rate, o.missing_attrs, o.seed));
    } else if (*run) {
      return RunVerb(o);
    } else if (*gencmd) {
      auto corpus = GenerateSynthetic(gen);
      fs::create_directories(gen_dir);
      WriteCsv((fs::path(gen_dir) / "repository.csv").string(), corpus.repository);
      for (std::size_t s = 0; s < corpus.streams.size(); ++s)
        WriteCsv((fs::path(gen_dir) / ("stream" + std::to_string(s) + ".csv")).string(),
                 corpus.streams[s]);
      std::string kw;
      for (const auto& k : corpus.keywords) kw += (kw.empty() ? "" : ",") + k;
      WriteFile((fs::path(gen_dir) / "keywords.txt").string(), kw + "\n");
    } else if (*benchcmd) {
      bench.gen.seed = o.seed;
      return BenchVerb(bench, o);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kIoError: return 3;
      case ErrorCode::kConfigError:
      case ErrorCode::kInvalidRate:
      case ErrorCode::kParseError: return 2;
      default: return 1;
    }
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
