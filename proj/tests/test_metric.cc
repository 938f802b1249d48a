#include <doctest.h>

#include <random>

#include "fixtures.h"
#include "terids/metric.h"

using namespace terids;
using terids::testing::RandomSet;
using terids::testing::Tuple;

namespace {

// |a ∩ b| / |a ∪ b| by counting over an explicit universe.
double SlowJaccard(const TokenSet& a, const TokenSet& b) {
  int inter = 0, uni = 0;
  for (int i = 0; i < 200; ++i) {
    const std::string t = "t" + std::to_string(i);
    const bool in_a = a.contains(t), in_b = b.contains(t);
    inter += in_a && in_b;
    uni += in_a || in_b;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

}  // namespace

TEST_CASE("jaccard examples") {
  CHECK(JaccardSim(TokenSet{"a", "b"}, TokenSet{"a", "b"}) == 1.0);
  CHECK(JaccardSim(TokenSet{"a", "b"}, TokenSet{"c", "d"}) == 0.0);
  CHECK(JaccardSim(TokenSet{"a", "b", "c"}, TokenSet{"b", "c", "d"}) == doctest::Approx(0.5));
}

TEST_CASE("tuple_sim examples") {
  auto r = Tuple("r", {TokenSet{"a", "b"}, TokenSet{"c"}, TokenSet{"d", "e", "f"}});
  CHECK(TupleSim(r, r) == doctest::Approx(3.0));
  auto disjoint = Tuple("q", {TokenSet{"x"}, TokenSet{"y"}, TokenSet{"z"}});
  CHECK(TupleSim(r, disjoint) == 0.0);
  // {a,b,c}/{b,c,d} = 0.5, {x}/{x} = 1, {p,q,r,s}/{p} = 0.25
  auto u = Tuple("u", {TokenSet{"a", "b", "c"}, TokenSet{"x"}, TokenSet{"p", "q", "r", "s"}});
  auto v = Tuple("v", {TokenSet{"b", "c", "d"}, TokenSet{"x"}, TokenSet{"p"}});
  CHECK(TupleSim(u, v) == doctest::Approx(1.75).epsilon(1e-12));
  auto incomplete = Tuple("i", {TokenSet{"a"}, std::nullopt, TokenSet{"b"}});
  CHECK_THROWS_AS(TupleSim(r, incomplete), Error);
}

TEST_CASE("ub_sim_by_size examples") {
  const SizeInterval a[] = {{10, 10}, {7, 7}, {5, 7}};
  const SizeInterval b[] = {{8, 8}, {10, 10}, {10, 12}};
  CHECK(UbSimBySize(a, b) == doctest::Approx(2.2).epsilon(1e-12));
  CHECK(std::abs(UbSimBySize(a, b) - 2.2) <= 1e-9);
  const SizeInterval eq[] = {{3, 3}, {3, 3}};
  CHECK(UbSimBySize(eq, eq) == 2.0);
  CHECK(UbSimBySizeAttr({4, 4}, {2, 2}) == doctest::Approx(0.5));
}

TEST_CASE("ub_sim_by_pivot examples") {
  const DistInterval x[] = {{0.3, 0.3}, {0.3, 0.3}, {0.1, 0.2}};
  const DistInterval y[] = {{0.7, 0.7}, {0.8, 0.8}, {0.7, 0.9}};
  CHECK(std::abs(UbSimByPivot(x, y) - 1.6) <= 1e-9);
  CHECK(UbSimByPivot(x, x) == 3.0);
  const DistInterval p[] = {{0.9, 0.9}};
  const DistInterval q[] = {{0.1, 0.2}};
  CHECK(std::abs(UbSimByPivot(p, q) - 0.3) <= 1e-9);
}

TEST_CASE("jaccard matches a counting oracle and is a metric") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    TokenSet a = RandomSet(rng, 12, 6), b = RandomSet(rng, 12, 6), c = RandomSet(rng, 12, 6);
    CHECK(JaccardSim(a, b) == doctest::Approx(SlowJaccard(a, b)).epsilon(1e-12));
    CHECK(JaccardSim(a, b) == JaccardSim(b, a));
    CHECK(JaccardDistance(a, c) <= JaccardDistance(a, b) + JaccardDistance(b, c) + 1e-12);
  }
}

TEST_CASE("tuple_sim symmetry and distance complement") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    std::vector<AttributeValue> xa, xb;
    double dist = 0.0;
    for (int k = 0; k < 4; ++k) {
      TokenSet a = RandomSet(rng, 10, 5), b = RandomSet(rng, 10, 5);
      dist += JaccardDistance(a, b);
      xa.emplace_back(a);
      xb.emplace_back(b);
    }
    auto r1 = Tuple("a", xa), r2 = Tuple("b", xb);
    CHECK(TupleSim(r1, r2) == TupleSim(r2, r1));
    CHECK(4.0 - TupleSim(r1, r2) == doctest::Approx(dist).epsilon(1e-12));
  }
}

TEST_CASE("both similarity bounds dominate every consistent instance pair") {
  std::mt19937_64 rng(3);
  const int d = 3;
  for (int trial = 0; trial < 1000; ++trial) {
    // Each side holds a few candidate values per attribute; the intervals
    // summarize them, and every concrete pick must stay under the bounds.
    std::vector<TokenSet> pivots;
    for (int x = 0; x < d; ++x) pivots.push_back(RandomSet(rng, 10, 5));
    auto side = [&](std::vector<std::vector<TokenSet>>& vals, std::vector<SizeInterval>& si,
                    std::vector<DistInterval>& di) {
      vals.resize(d);
      si.resize(d);
      di.resize(d);
      for (int x = 0; x < d; ++x) {
        const int n = 1 + static_cast<int>(rng() % 3);
        for (int k = 0; k < n; ++k) vals[x].push_back(RandomSet(rng, 10, 5));
        si[x] = {1000, 0};
        di[x] = {1.0, 0.0};
        for (const auto& v : vals[x]) {
          const int s = static_cast<int>(v.size());
          si[x] = {std::min(si[x].min_size, s), std::max(si[x].max_size, s)};
          const double dd = JaccardDistance(v, pivots[x]);
          di[x] = {std::min(di[x].lb, dd), std::max(di[x].ub, dd)};
        }
      }
    };
    std::vector<std::vector<TokenSet>> va, vb;
    std::vector<SizeInterval> sa, sb;
    std::vector<DistInterval> da, db;
    side(va, sa, da);
    side(vb, sb, db);
    const double ub_size = UbSimBySize(sa, sb);
    const double ub_piv = UbSimByPivot(da, db);
    for (int pick = 0; pick < 8; ++pick) {
      double sim = 0.0;
      for (int x = 0; x < d; ++x)
        sim += JaccardSim(va[x][rng() % va[x].size()], vb[x][rng() % vb[x].size()]);
      CHECK(sim <= ub_size + 1e-12);
      CHECK(sim <= ub_piv + 1e-12);
    }
  }
}

TEST_CASE("absolute difference fixture distance") {
  DistanceFn abs{DistanceKind::kAbsDiff};
  CHECK(abs(TokenSet{"0.3"}, TokenSet{"0.1"}) == doctest::Approx(0.2));
  CHECK(abs(TokenSet{"a1"}, TokenSet{"a1"}) == 0.0);
  CHECK(abs(TokenSet{"a1"}, TokenSet{"a2"}) == 1.0);
}
