#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "terids/engine.h"
#include "terids/model.h"

namespace terids {

inline constexpr std::string_view kMissingToken = "__MISSING__";

// Rows of raw CSV text. Stream files carry `rid,time,<attrs>`; repository
// files carry `rid,<attrs>`.
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> ParseCsvLine(std::string_view line);
std::string FormatCsvLine(const std::vector<std::string>& fields);

// Throws kIoError on unreadable files, kParseError on ragged rows.
RawTable ReadCsv(const std::string& path);
RawTable ParseCsv(std::string_view text, const std::string& origin = "<text>");
std::string FormatCsv(const RawTable& t);
void WriteCsv(const std::string& path, const RawTable& t);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view content);

// Stream and repository tables share the header
// rid,stream_id,arrival_time,attr_1..attr_d.
inline constexpr int kLeadingColumns = 3;
// Number of attribute columns; throws kParseError on a malformed header.
int TableDims(const RawTable& t);
std::vector<std::string> TableHeader(int dims);

std::vector<StreamTuple> ToStreamTuples(const RawTable& t);
// Repository rows ignore the stream_id and arrival_time columns.
std::vector<StreamTuple> ToRepositoryTuples(const RawTable& t);

// Marks `m` random attributes of floor(rate * N) random rows as missing.
// Throws kInvalidRate unless 0 <= rate <= 1, kConfigError unless 0 <= m < d.
RawTable InjectMissing(const RawTable& stream, double rate, int m, std::uint64_t seed);

// First ceil(ratio * N) rows after a seeded shuffle. Throws kInvalidRate
// unless 0 < ratio <= 1.
RawTable SubsampleRows(const RawTable& t, double ratio, std::uint64_t seed);

// `{"ts":..,"kind":..,"rid_a":..,"rid_b":..,"prob":..}` with 12 significant
// digits for prob.
std::string FormatEvent(const Event& e);

}  // namespace terids
