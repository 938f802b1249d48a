#include "terids/model.h"

#include "terids/keywords.h"

#include <algorithm>
#include <cctype>

namespace terids {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyValue: return "EmptyValue";
    case ErrorCode::kOutOfOrderArrival: return "OutOfOrderArrival";
    case ErrorCode::kIncompleteTuple: return "IncompleteTuple";
    case ErrorCode::kDeterminantMissing: return "DeterminantMissing";
    case ErrorCode::kNoRulesFound: return "NoRulesFound";
    case ErrorCode::kNoSupportingSample: return "NoSupportingSample";
    case ErrorCode::kImputationFailed: return "ImputationFailed";
    case ErrorCode::kEmptyDomain: return "EmptyDomain";
    case ErrorCode::kDuplicateTuple: return "DuplicateTuple";
    case ErrorCode::kUnknownTuple: return "UnknownTuple";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvalidRate: return "InvalidRate";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

TokenSet::TokenSet(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  std::sort(tokens_.begin(), tokens_.end());
  tokens_.erase(std::unique(tokens_.begin(), tokens_.end()), tokens_.end());
  if (tokens_.empty()) throw Error(ErrorCode::kEmptyValue, "token set is empty");
  if (tokens_.front().empty()) throw Error(ErrorCode::kEmptyValue, "empty token");
}

bool TokenSet::contains(std::string_view token) const {
  return std::binary_search(tokens_.begin(), tokens_.end(), token);
}

std::string TokenSet::Join(std::string_view sep) const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i) out += sep;
    out += tokens_[i];
  }
  return out;
}

bool StreamTuple::complete() const {
  return std::all_of(attrs.begin(), attrs.end(),
                     [](const AttributeValue& v) { return v.has_value(); });
}

std::vector<int> StreamTuple::MissingAttrs() const {
  std::vector<int> out;
  for (std::size_t j = 0; j < attrs.size(); ++j)
    if (!attrs[j]) out.push_back(static_cast<int>(j));
  return out;
}

TokenSet Tokenize(std::string_view raw) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : raw) {
    auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c)) {
      cur.push_back(static_cast<char>(c >= 0x80 ? c : std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  if (tokens.empty())
    throw Error(ErrorCode::kEmptyValue, "'" + std::string(raw) + "' has no tokens");
  return TokenSet(std::move(tokens));
}

bool ContainsKeyword(const TokenSet& t, const KeywordSet& keywords) {
  // Both sides are sorted; walk them together.
  auto a = t.tokens().begin();
  auto b = keywords.begin();
  while (a != t.tokens().end() && b != keywords.end()) {
    int c = a->compare(*b);
    if (c == 0) return true;
    if (c < 0) ++a; else ++b;
  }
  return false;
}

SlidingWindow::SlidingWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error(ErrorCode::kConfigError, "window capacity must be >= 1");
}

std::optional<StreamTuple> SlidingWindow::Advance(StreamTuple incoming) {
  auto& q = contents_[incoming.stream_id];
  if (!q.empty() && incoming.arrival_time <= q.back().arrival_time) {
    throw Error(ErrorCode::kOutOfOrderArrival,
                "stream " + std::to_string(incoming.stream_id) + " got t=" +
                    std::to_string(incoming.arrival_time) + " after t=" +
                    std::to_string(q.back().arrival_time));
  }
  q.push_back(std::move(incoming));
  if (q.size() <= capacity_) return std::nullopt;
  StreamTuple evicted = std::move(q.front());
  q.pop_front();
  return evicted;
}

const std::deque<StreamTuple>& SlidingWindow::Contents(int stream_id) const {
  static const std::deque<StreamTuple> kEmpty;
  auto it = contents_.find(stream_id);
  return it == contents_.end() ? kEmpty : it->second;
}

std::vector<int> SlidingWindow::Streams() const {
  std::vector<int> out;
  for (const auto& [id, q] : contents_) out.push_back(id);
  return out;
}

Repository::Repository(std::vector<StreamTuple> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) return;
  dims_ = static_cast<int>(samples_.front().dims());
  for (const auto& s : samples_) {
    if (static_cast<int>(s.dims()) != dims_)
      throw Error(ErrorCode::kConfigError, "repository sample " + s.rid + " has wrong arity");
    if (!s.complete())
      throw Error(ErrorCode::kIncompleteTuple, "repository sample " + s.rid + " is incomplete");
  }
  domains_.resize(dims_);
  counts_.resize(dims_);
  value_ids_.assign(samples_.size(), std::vector<int>(dims_));
  for (int x = 0; x < dims_; ++x) {
    std::map<TokenSet, int> ids;
    for (const auto& s : samples_) ids.emplace(*s.attrs[x], 0);
    int next = 0;
    for (auto& [v, id] : ids) {
      id = next++;
      domains_[x].push_back(v);
    }
    counts_[x].assign(domains_[x].size(), 0);
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      int id = ids.at(*samples_[i].attrs[x]);
      value_ids_[i][x] = id;
      ++counts_[x][id];
    }
  }
}

std::optional<int> Repository::FindValue(int attr, const TokenSet& v) const {
  const auto& dom = domains_[attr];
  auto it = std::lower_bound(dom.begin(), dom.end(), v);
  if (it == dom.end() || *it != v) return std::nullopt;
  return static_cast<int>(it - dom.begin());
}

QueryConfig QueryConfig::Make(KeywordSet keywords, int dims, double rho, double alpha,
                              std::size_t window_size) {
  if (keywords.empty()) throw Error(ErrorCode::kConfigError, "keyword set is empty");
  if (dims < 1) throw Error(ErrorCode::kConfigError, "dims must be >= 1");
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorCode::kConfigError, "rho must be in (0,1)");
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw Error(ErrorCode::kConfigError, "alpha must be in [0,1)");
  if (window_size < 1) throw Error(ErrorCode::kConfigError, "window size must be >= 1");
  QueryConfig cfg;
  cfg.keywords = std::move(keywords);
  cfg.dims = dims;
  cfg.rho = rho;
  cfg.gamma = rho * dims;
  cfg.alpha = alpha;
  cfg.window_size = window_size;
  return cfg;
}

std::string KeywordMask::ToString() const {
  std::string out;
  for (std::size_t i = 0; i < words_.size() * 64; ++i) out.push_back(Test(i) ? '1' : '0');
  while (!out.empty() && out.back() == '0') out.pop_back();
  return out.empty() ? "0" : out;
}

KeywordMask MaskOf(const TokenSet& t, std::span<const std::string> keywords) {
  KeywordMask m(keywords.size());
  for (std::size_t i = 0; i < keywords.size(); ++i)
    if (t.contains(keywords[i])) m.Set(i);
  return m;
}

}  // namespace terids
