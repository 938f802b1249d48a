#pragma once

// Shared scenarios: the exhaustive pair evaluator with random imputed tuples,
// and the scripted three-tuple window trace.

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.h"
#include "terids/engine.h"
#include "terids/pivot.h"
#include "terids/prune.h"

namespace terids::testing {

// Cartesian product of per-attribute candidates as (values, prob) pairs.
inline std::vector<std::pair<std::vector<TokenSet>, double>> Instances(const ImputedTuple& it) {
  std::vector<std::pair<std::vector<TokenSet>, double>> out{{{}, 1.0}};
  for (const auto& cands : it.candidates) {
    std::vector<std::pair<std::vector<TokenSet>, double>> next;
    for (const auto& [vals, p] : out)
      for (const auto& c : cands) {
        auto v = vals;
        v.push_back(c.value);
        next.push_back({std::move(v), p * c.prob});
      }
    out = std::move(next);
  }
  return out;
}

struct Exhaustive {
  double prob = 0.0;
  double max_sim = 0.0;
};

// Direct double sum over instance pairs.
inline Exhaustive Evaluate(const ImputedTuple& a, const ImputedTuple& b, const QueryConfig& cfg) {
  Exhaustive e;
  auto topical = [&](const std::vector<TokenSet>& vals) {
    for (const auto& v : vals)
      for (const auto& t : v.tokens())
        if (cfg.keywords.count(t)) return true;
    return false;
  };
  for (const auto& [va, pa] : Instances(a))
    for (const auto& [vb, pb] : Instances(b)) {
      double sim = 0.0;
      for (std::size_t x = 0; x < va.size(); ++x) sim += JaccardSim(va[x], vb[x]);
      e.max_sim = std::max(e.max_sim, sim);
      if ((topical(va) || topical(vb)) && sim > cfg.gamma) e.prob += pa * pb;
    }
  return e;
}

inline ImputedTuple RandomImputed(std::mt19937_64& rng, int d, int vocab) {
  std::vector<AttributeValue> attrs;
  for (int x = 0; x < d; ++x) attrs.emplace_back(RandomSet(rng, vocab, 4));
  ImputedTuple it = AsImputed(Tuple("r", attrs));
  const int missing = static_cast<int>(rng() % 3);
  for (int k = 0; k < missing; ++k) {
    const int x = static_cast<int>(rng() % d);
    const int n = 1 + static_cast<int>(rng() % 4);
    std::vector<double> w;
    for (int i = 0; i < n; ++i) w.push_back(1.0 + static_cast<double>(rng() % 5));
    double total = 0.0;
    for (double v : w) total += v;
    it.candidates[x].clear();
    for (int i = 0; i < n; ++i) it.candidates[x].push_back({RandomSet(rng, vocab, 4), w[i] / total});
  }
  return it;
}

// Three entities over three attributes; only x and y carry the keyword.
inline StreamTuple ScriptEntity(char e, const std::string& rid, int stream, std::int64_t t) {
  const std::string p(1, e);
  TokenSet a = e == 'z' ? TokenSet{"z0"} : TokenSet{"k", p + "0"};
  return Tuple(rid, {a, TokenSet{p + "1"}, TokenSet{p + "2"}}, stream, t);
}

inline Model ScriptModel() {
  Repository repo({ScriptEntity('x', "s1", 0, 0), ScriptEntity('y', "s2", 0, 0),
                   ScriptEntity('z', "s3", 0, 0)});
  Model m;
  m.pivots = SelectPivots(repo, {}, kJac);
  m.repo = std::make_shared<Repository>(std::move(repo));
  return m;
}

using ScriptEvent = std::pair<char, std::pair<std::string, std::string>>;

// Entities arriving on streams 0 and 1 at each timestamp.
inline const std::map<int, std::pair<char, char>>& Script() {
  static const std::map<int, std::pair<char, char>> s{
      {1, {'x', 'x'}}, {2, {'y', 'y'}}, {3, {'x', 'z'}}, {4, {'z', 'x'}},
      {5, {'y', 'y'}}, {6, {'z', 'z'}}, {7, {'z', 'z'}}};
  return s;
}

// Expected events per timestamp under w = 3: expirations first, then matches.
inline const std::map<int, std::vector<ScriptEvent>>& ScriptExpected() {
  static const std::map<int, std::vector<ScriptEvent>> want{
      {1, {{'m', {"a1", "b1"}}}},
      {2, {{'m', {"a2", "b2"}}}},
      {3, {{'m', {"a3", "b1"}}}},
      {4, {{'e', {"a1", "b1"}}, {'e', {"a3", "b1"}}, {'m', {"a3", "b4"}}}},
      {5, {{'e', {"a2", "b2"}}, {'m', {"a5", "b5"}}}},
      {6, {{'e', {"a3", "b4"}}}},
      {7, {}}};
  return want;
}

// Runs the script through `mode`; empty when every timestamp meets the
// expectations and no live result names an expired rid.
inline std::string RunScript(Mode mode) {
  const auto cfg = QueryConfig::Make({"k"}, 3, 0.5, 0.5, 3);
  auto proc = MakeProcessor(mode, ScriptModel(), cfg, {});
  std::set<std::string> expired;
  std::ostringstream os;
  for (const auto& [t, ents] : Script()) {
    const std::string n = std::to_string(t);
    auto events = proc->Step(
        {ScriptEntity(ents.first, "a" + n, 0, t), ScriptEntity(ents.second, "b" + n, 1, t)});
    std::vector<ScriptEvent> got;
    for (const auto& e : events) {
      if (e.ts != t) os << "t=" << t << " event stamped " << e.ts << "; ";
      if (e.kind == Event::Kind::kMatch && e.prob != 1.0) os << "t=" << t << " prob " << e.prob << "; ";
      got.push_back({e.kind == Event::Kind::kMatch ? 'm' : 'e', {e.rid_a, e.rid_b}});
    }
    if (got != ScriptExpected().at(t)) os << "t=" << t << " unexpected events; ";
    if (t > 3) {
      expired.insert("a" + std::to_string(t - 3));
      expired.insert("b" + std::to_string(t - 3));
    }
    for (const auto& [key, p] : proc->results().pairs())
      if (expired.count(key.first) || expired.count(key.second) || p <= cfg.alpha)
        os << "t=" << t << " stale result " << key.first << "," << key.second << "; ";
  }
  return os.str();
}

}  // namespace terids::testing
