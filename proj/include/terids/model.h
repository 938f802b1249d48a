#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "terids/error.h"

namespace terids {

// A non-empty set of tokens kept sorted and deduplicated.
class TokenSet {
 public:
  // Throws kEmptyValue if `tokens` is empty or contains an empty token.
  explicit TokenSet(std::vector<std::string> tokens);
  TokenSet(std::initializer_list<std::string> tokens)
      : TokenSet(std::vector<std::string>(tokens)) {}

  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  bool contains(std::string_view token) const;

  // Tokens joined by `sep`.
  std::string Join(std::string_view sep = " ") const;

  auto operator<=>(const TokenSet&) const = default;
  bool operator==(const TokenSet&) const = default;

 private:
  std::vector<std::string> tokens_;
};

using KeywordSet = std::set<std::string>;

// Missing is std::nullopt. A present value always holds a non-empty TokenSet.
using AttributeValue = std::optional<TokenSet>;

struct StreamTuple {
  std::string rid;
  int stream_id = 0;
  std::int64_t arrival_time = 0;
  std::vector<AttributeValue> attrs;

  std::size_t dims() const { return attrs.size(); }
  bool complete() const;
  std::vector<int> MissingAttrs() const;
};

// Lowercases, splits on whitespace and ASCII punctuation, deduplicates.
// Bytes >= 0x80 are kept as token characters so UTF-8 text survives.
TokenSet Tokenize(std::string_view raw);

bool ContainsKeyword(const TokenSet& t, const KeywordSet& keywords);

// Count-based window holding at most `capacity` tuples per stream.
class SlidingWindow {
 public:
  explicit SlidingWindow(std::size_t capacity);

  // Appends `incoming` to its stream and returns the evicted oldest tuple
  // when the stream was already at capacity.
  std::optional<StreamTuple> Advance(StreamTuple incoming);

  std::size_t capacity() const { return capacity_; }
  const std::deque<StreamTuple>& Contents(int stream_id) const;
  std::vector<int> Streams() const;
  std::size_t Size(int stream_id) const { return Contents(stream_id).size(); }

 private:
  std::size_t capacity_;
  std::map<int, std::deque<StreamTuple>> contents_;
};

// Complete samples plus the per-attribute value domains they induce.
class Repository {
 public:
  Repository() = default;
  // Throws kIncompleteTuple if any sample has a missing attribute, and
  // kConfigError if samples disagree on dimensionality.
  explicit Repository(std::vector<StreamTuple> samples);

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  int dims() const { return dims_; }

  const std::vector<StreamTuple>& samples() const { return samples_; }
  const TokenSet& Value(std::size_t sample, int attr) const {
    return *samples_[sample].attrs[attr];
  }

  // Sorted distinct values of attribute `attr`.
  const std::vector<TokenSet>& Domain(int attr) const { return domains_[attr]; }
  // Index of samples' value in Domain(attr).
  int ValueId(std::size_t sample, int attr) const { return value_ids_[sample][attr]; }
  // Number of samples carrying each domain value.
  const std::vector<int>& DomainCounts(int attr) const { return counts_[attr]; }
  std::optional<int> FindValue(int attr, const TokenSet& v) const;

 private:
  std::vector<StreamTuple> samples_;
  int dims_ = 0;
  std::vector<std::vector<TokenSet>> domains_;
  std::vector<std::vector<int>> counts_;
  std::vector<std::vector<int>> value_ids_;
};

struct QueryConfig {
  KeywordSet keywords;
  int dims = 0;
  double rho = 0.5;
  double gamma = 0.0;
  double alpha = 0.5;
  std::size_t window_size = 1;

  // gamma is derived as rho * dims. Throws kConfigError on violated invariants.
  static QueryConfig Make(KeywordSet keywords, int dims, double rho, double alpha,
                          std::size_t window_size);

  // Keyword list in set order; bit positions of keyword masks follow it.
  std::vector<std::string> KeywordList() const {
    return {keywords.begin(), keywords.end()};
  }
};

}  // namespace terids
