#include "terids/io.h"

#include <charconv>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

namespace terids {

std::vector<std::string> ParseCsvLine(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorCode::kParseError, "unterminated quote");
  out.push_back(std::move(cur));
  return out;
}

std::string FormatCsvLine(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    const auto& f = fields[i];
    if (f.find_first_of(",\"\n") == std::string::npos) {
      out += f;
      continue;
    }
    out.push_back('"');
    for (char c : f) {
      if (c == '"') out.push_back('"');
      out.push_back(c);
    }
    out.push_back('"');
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path);
}

RawTable ParseCsv(std::string_view text, const std::string& origin) {
  RawTable t;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields;
    try {
      fields = ParseCsvLine(line);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size())
      throw Error(ErrorCode::kParseError, origin + ":" + std::to_string(line_no) + ": expected " +
                                              std::to_string(t.header.size()) + " fields, got " +
                                              std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
  }
  if (t.header.empty()) throw Error(ErrorCode::kParseError, origin + ": missing header");
  return t;
}

RawTable ReadCsv(const std::string& path) { return ParseCsv(ReadFile(path), path); }

std::string FormatCsv(const RawTable& t) {
  std::string out = FormatCsvLine(t.header) + "\n";
  for (const auto& r : t.rows) out += FormatCsvLine(r) + "\n";
  return out;
}

void WriteCsv(const std::string& path, const RawTable& t) { WriteFile(path, FormatCsv(t)); }

int TableDims(const RawTable& t) {
  if (t.header.size() < 4 || t.header[0] != "rid" || t.header[1] != "stream_id" ||
      t.header[2] != "arrival_time")
    throw Error(ErrorCode::kParseError, "table header must be rid,stream_id,arrival_time,attrs...");
  return static_cast<int>(t.header.size()) - kLeadingColumns;
}

std::vector<std::string> TableHeader(int dims) {
  std::vector<std::string> h{"rid", "stream_id", "arrival_time"};
  for (int x = 1; x <= dims; ++x) h.push_back("attr_" + std::to_string(x));
  return h;
}

namespace {

AttributeValue ParseValue(const std::string& raw) {
  if (raw == kMissingToken) return std::nullopt;
  return Tokenize(raw);
}

}  // namespace

namespace {

std::int64_t ParseInt(const std::string& cell, std::size_t row, const char* what) {
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || end != cell.data() + cell.size())
    throw Error(ErrorCode::kParseError,
                "row " + std::to_string(row + 2) + ": bad " + what + " '" + cell + "'");
  return v;
}

}  // namespace

std::vector<StreamTuple> ToStreamTuples(const RawTable& t) {
  const int d = TableDims(t);
  std::vector<StreamTuple> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    StreamTuple s;
    s.rid = row[0];
    s.stream_id = static_cast<int>(ParseInt(row[1], i, "stream_id"));
    s.arrival_time = ParseInt(row[2], i, "arrival_time");
    for (int x = 0; x < d; ++x) s.attrs.push_back(ParseValue(row[kLeadingColumns + x]));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<StreamTuple> ToRepositoryTuples(const RawTable& t) {
  const int d = TableDims(t);
  std::vector<StreamTuple> out;
  for (const auto& row : t.rows) {
    StreamTuple s;
    s.rid = row[0];
    for (int x = 0; x < d; ++x) s.attrs.push_back(ParseValue(row[kLeadingColumns + x]));
    out.push_back(std::move(s));
  }
  return out;
}

RawTable InjectMissing(const RawTable& stream, double rate, int m, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw Error(ErrorCode::kInvalidRate, "missing rate must be in [0,1]");
  const int d = TableDims(stream);
  if (m < 0 || m >= d) throw Error(ErrorCode::kConfigError, "missing attribute count must be in [0,d)");
  RawTable out = stream;
  const std::size_t n = out.rows.size();
  const auto picked = static_cast<std::size_t>(std::floor(rate * static_cast<double>(n)));
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::shuffle(rows.begin(), rows.end(), rng);
  rows.resize(picked);
  std::sort(rows.begin(), rows.end());
  std::vector<int> attrs(d);
  for (auto r : rows) {
    std::iota(attrs.begin(), attrs.end(), 0);
    std::shuffle(attrs.begin(), attrs.end(), rng);
    for (int k = 0; k < m; ++k) out.rows[r][kLeadingColumns + attrs[k]] = std::string(kMissingToken);
  }
  return out;
}

RawTable SubsampleRows(const RawTable& t, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio <= 1.0))
    throw Error(ErrorCode::kInvalidRate, "repository ratio must be in (0,1]");
  RawTable out;
  out.header = t.header;
  std::vector<std::size_t> rows(t.rows.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(rows.begin(), rows.end(), rng);
  rows.resize(static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(rows.size()))));
  for (auto r : rows) out.rows.push_back(t.rows[r]);
  return out;
}

std::string FormatEvent(const Event& e) {
  char prob[32];
  std::snprintf(prob, sizeof prob, "%.12g", e.prob);
  std::string out = "{\"ts\":" + std::to_string(e.ts) + ",\"kind\":\"" +
                    (e.kind == Event::Kind::kMatch ? "match" : "expire") +
                    "\",\"rid_a\":" + nlohmann::json(e.rid_a).dump() +
                    ",\"rid_b\":" + nlohmann::json(e.rid_b).dump() + ",\"prob\":" + prob + "}";
  return out;
}

}  // namespace terids
