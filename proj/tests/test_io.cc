#include <doctest.h>

#include "terids/io.h"
#include "terids/metric.h"
#include "terids/synthetic.h"

using namespace terids;

namespace {

RawTable SmallStream(int rows, int d) {
  RawTable t;
  t.header = TableHeader(d);
  for (int i = 0; i < rows; ++i) {
    std::vector<std::string> row{"r" + std::to_string(i), "4", std::to_string(i + 1)};
    for (int x = 0; x < d; ++x) row.push_back("v" + std::to_string(i) + " w" + std::to_string(x));
    t.rows.push_back(row);
  }
  return t;
}

int MissingCells(const std::vector<std::string>& row) {
  int n = 0;
  for (const auto& c : row) n += c == kMissingToken;
  return n;
}

}  // namespace

TEST_CASE("csv round trip with quoting") {
  RawTable t;
  t.header = {"rid", "a"};
  t.rows = {{"x", "plain"}, {"y", "with, comma"}, {"z", "say \"hi\""}};
  CHECK(ParseCsv(FormatCsv(t)).rows == t.rows);
  CHECK(ParseCsvLine("a,\"b,c\",d") == std::vector<std::string>{"a", "b,c", "d"});
  CHECK_THROWS_AS(ParseCsv("rid,a\nx\n"), Error);
  CHECK_THROWS_AS(ReadCsv("/nonexistent/file.csv"), Error);
}

TEST_CASE("stream rows become tuples") {
  RawTable t = SmallStream(3, 2);
  t.rows[1][4] = std::string(kMissingToken);
  auto tuples = ToStreamTuples(t);
  REQUIRE(tuples.size() == 3);
  CHECK(tuples[0].stream_id == 4);
  CHECK(tuples[2].arrival_time == 3);
  CHECK(tuples[0].attrs[0] == TokenSet{"v0", "w0"});
  CHECK_FALSE(tuples[1].attrs[1].has_value());
  t.rows[0][2] = "soon";
  CHECK_THROWS_AS(ToStreamTuples(t), Error);
  t.header[1] = "stream";
  CHECK_THROWS_AS(ToRepositoryTuples(t), Error);
}

TEST_CASE("missing value injection") {
  RawTable t = SmallStream(50, 4);
  CHECK(InjectMissing(t, 0.0, 1, 3).rows == t.rows);
  RawTable all = InjectMissing(t, 1.0, 1, 3);
  for (const auto& row : all.rows) CHECK(MissingCells(row) == 1);
  RawTable some = InjectMissing(t, 0.3, 2, 9);
  int touched = 0;
  for (const auto& row : some.rows) {
    const int m = MissingCells(row);
    CHECK((m == 0 || m == 2));
    touched += m > 0;
  }
  CHECK(touched == 15);
  CHECK(FormatCsv(InjectMissing(t, 0.3, 2, 9)) == FormatCsv(some));
  CHECK_THROWS_AS(InjectMissing(t, 1.5, 1, 1), Error);
  CHECK_THROWS_AS(InjectMissing(t, 0.5, 4, 1), Error);
}

TEST_CASE("repository subsampling") {
  RawTable t = SmallStream(10, 1);
  CHECK(SubsampleRows(t, 0.25, 1).rows.size() == 3);
  CHECK(SubsampleRows(t, 1.0, 1).rows.size() == 10);
  CHECK(SubsampleRows(t, 0.5, 7).rows == SubsampleRows(t, 0.5, 7).rows);
  CHECK_THROWS_AS(SubsampleRows(t, 0.0, 1), Error);
}

TEST_CASE("event lines") {
  Event e{3, Event::Kind::kMatch, "a", "b", 2.0 / 3};
  CHECK(FormatEvent(e) ==
        "{\"ts\":3,\"kind\":\"match\",\"rid_a\":\"a\",\"rid_b\":\"b\",\"prob\":0.666666666667}");
}

TEST_CASE("synthetic corpus") {
  SyntheticParams p;
  p.length = 300;
  p.repo_size = 200;
  p.vocab = 120;
  p.topics = 6;

  SUBCASE("same seed gives identical output") {
    auto a = GenerateSynthetic(p), b = GenerateSynthetic(p);
    CHECK(FormatCsv(a.repository) == FormatCsv(b.repository));
    CHECK(FormatCsv(a.streams[1]) == FormatCsv(b.streams[1]));
    p.seed = 2;
    CHECK(FormatCsv(GenerateSynthetic(p).streams[0]) != FormatCsv(a.streams[0]));
  }
  SUBCASE("zero length gives header-only streams") {
    p.length = 0;
    auto c = GenerateSynthetic(p);
    REQUIRE(c.streams.size() == 2);
    for (const auto& s : c.streams) {
      CHECK(s.rows.empty());
      CHECK(s.header == TableHeader(p.dims));
    }
  }
  SUBCASE("cross-stream duplicates share most tokens") {
    auto c = GenerateSynthetic(p);
    auto s0 = ToStreamTuples(c.streams[0]), s1 = ToStreamTuples(c.streams[1]);
    CHECK(s1[0].stream_id == 1);
    double total = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < s0.size(); ++i)
      for (std::size_t j = 0; j < s1.size(); ++j) {
        if (c.entities[0][i] != c.entities[1][j]) continue;
        for (int x = 0; x < p.dims; ++x) total += JaccardSim(*s0[i].attrs[x], *s1[j].attrs[x]);
        n += p.dims;
      }
    REQUIRE(n > 0);
    MESSAGE("mean per-attribute Jaccard of duplicates " << total / n);
    CHECK(total / n > 0.5);
  }
  SUBCASE("keywords come from the first topic and stay rare") {
    auto c = GenerateSynthetic(p);
    REQUIRE(c.keywords.size() == 1);
    CHECK(c.keywords[0] == "w0");
  }
  SUBCASE("invalid parameters") {
    p.topics = 200;
    CHECK_THROWS_AS(GenerateSynthetic(p), Error);
  }
}
