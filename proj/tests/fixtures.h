#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "terids/cdd.h"
#include "terids/metric.h"
#include "terids/model.h"
#include "terids/rtree.h"

namespace terids::testing {

inline StreamTuple Tuple(std::string rid, std::vector<AttributeValue> attrs, int stream = 0,
                         std::int64_t time = 0) {
  StreamTuple t;
  t.rid = std::move(rid);
  t.stream_id = stream;
  t.arrival_time = time;
  t.attrs = std::move(attrs);
  return t;
}

inline TokenSet V(const std::string& token) { return TokenSet{token}; }

// The three-attribute numeric repository used by the rule and imputation
// examples: A is categorical, B and C are single numbers.
inline Repository NumericRepo() {
  return Repository({Tuple("s1", {V("a1"), V("0.2"), V("0.1")}),
                     Tuple("s2", {V("a1"), V("0.3"), V("0.2")}),
                     Tuple("s3", {V("a1"), V("0.5"), V("0.35")}),
                     Tuple("s4", {V("a2"), V("0.7"), V("0.7")})});
}

// AB -> C, {a1, [0, 0.1], [0, 0.1]}
inline CddRule Cdd1() {
  CddRule r;
  r.determinants = {{0, ConstantConstraint{V("a1")}}, {1, IntervalConstraint{0.0, 0.1, false}}};
  r.dependent = 2;
  r.dep_interval = {0.0, 0.1};
  return r;
}

// AB -> C, {a1, (0.1, 0.2], [0, 0.2]}
inline CddRule Cdd2() {
  CddRule r;
  r.determinants = {{0, ConstantConstraint{V("a1")}}, {1, IntervalConstraint{0.1, 0.2, true}}};
  r.dependent = 2;
  r.dep_interval = {0.0, 0.2};
  return r;
}

inline const DistanceFn kAbs{DistanceKind::kAbsDiff};
inline const DistanceFn kJac{};

// Random token set drawn from tokens t0..t{vocab-1}.
inline TokenSet RandomSet(std::mt19937_64& rng, int vocab, int max_size) {
  std::uniform_int_distribution<int> size(1, max_size);
  std::uniform_int_distribution<int> tok(0, vocab - 1);
  std::vector<std::string> out;
  const int n = size(rng);
  for (int i = 0; i < n; ++i) out.push_back("t" + std::to_string(tok(rng)));
  return TokenSet(std::move(out));
}

// Random complete repository over a small vocabulary, biased so that
// attributes are correlated and rules can be mined.
inline Repository RandomRepo(std::mt19937_64& rng, int size, int dims, int vocab) {
  std::vector<StreamTuple> samples;
  std::uniform_int_distribution<int> cluster(0, 5);
  for (int i = 0; i < size; ++i) {
    const int c = cluster(rng);
    std::vector<AttributeValue> attrs;
    for (int x = 0; x < dims; ++x) {
      // Half the values are the bare cluster token so exact repeats are common.
      std::vector<std::string> toks;
      if (rng() % 2) toks = RandomSet(rng, vocab, 2).tokens();
      toks.push_back("c" + std::to_string(c) + "x" + std::to_string(x));
      attrs.emplace_back(TokenSet(std::move(toks)));
    }
    samples.push_back(Tuple("s" + std::to_string(i), std::move(attrs)));
  }
  return Repository(std::move(samples));
}

// One or two determinants on attributes other than `dependent`, each a
// domain constant or a [0, hi] interval.
inline CddRule RandomRule(std::mt19937_64& rng, const Repository& repo, int dependent) {
  const int d = repo.dims();
  std::vector<int> others;
  for (int x = 0; x < d; ++x)
    if (x != dependent) others.push_back(x);
  std::shuffle(others.begin(), others.end(), rng);
  const int k = 1 + static_cast<int>(rng() % std::min<std::size_t>(2, others.size()));
  std::vector<int> attrs(others.begin(), others.begin() + k);
  std::sort(attrs.begin(), attrs.end());
  CddRule r;
  r.dependent = dependent;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int a : attrs) {
    if (rng() % 2) {
      const auto& dom = repo.Domain(a);
      r.determinants.push_back({a, ConstantConstraint{dom[rng() % dom.size()]}});
    } else {
      const double hi = 0.1 + 0.9 * u(rng);
      r.determinants.push_back({a, IntervalConstraint{0.0, hi, false}});
    }
  }
  const double lo = 0.3 * u(rng);
  r.dep_interval = {lo, lo + 0.3 * u(rng)};
  return r;
}

// A repository sample with the dependent and some other attributes blanked
// and some values replaced by random sets.
inline StreamTuple RandomProbe(std::mt19937_64& rng, const Repository& repo, int dependent) {
  StreamTuple t = repo.samples()[rng() % repo.size()];
  for (int x = 0; x < repo.dims(); ++x) {
    if (x == dependent || rng() % 5 == 0) {
      t.attrs[x].reset();
    } else if (rng() % 3 == 0) {
      t.attrs[x] = RandomSet(rng, 12, 3);
    }
  }
  return t;
}

// Item indices stored in the leaves below `node`.
inline std::vector<std::uint32_t> LeafItems(const PackedTree& t, std::uint32_t node) {
  std::vector<std::uint32_t> out, stack{node};
  while (!stack.empty()) {
    const auto n = stack.back();
    stack.pop_back();
    const auto& nd = t.nodes[n];
    for (auto c : nd.children) (nd.leaf ? out : stack).push_back(c);
  }
  return out;
}

}  // namespace terids::testing
