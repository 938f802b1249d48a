#include "terids/pivot.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace terids {
namespace {

double EntropyOfCounts(const std::map<std::vector<int>, long>& hist, long total) {
  double h = 0.0;
  for (const auto& [key, c] : hist) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

// Distances between every domain value of `attr` and `value`.
std::vector<double> DomainDistancesTo(const Repository& repo, int attr, const TokenSet& value,
                                      const DistanceFn& dist) {
  const auto& dom = repo.Domain(attr);
  std::vector<double> out(dom.size());
  for (std::size_t v = 0; v < dom.size(); ++v) out[v] = dist(dom[v], value);
  return out;
}

// Joint entropy where each domain value carries its bucket codes under the
// already-chosen pivots plus one candidate column.
double JointEntropyOf(const std::vector<std::vector<int>>& codes, const std::vector<int>& extra,
                      const std::vector<int>& counts, long total) {
  std::map<std::vector<int>, long> hist;
  for (std::size_t v = 0; v < counts.size(); ++v) {
    std::vector<int> key = codes[v];
    if (!extra.empty()) key.push_back(extra[v]);
    hist[key] += counts[v];
  }
  return EntropyOfCounts(hist, total);
}

std::string_view FieldValue(std::string_view line, std::string_view name) {
  std::string key = std::string(name) + "=";
  auto pos = line.find(key);
  if (pos == std::string_view::npos)
    throw Error(ErrorCode::kParseError, "PIVOT line lacks " + std::string(name));
  auto rest = line.substr(pos + key.size());
  return rest.substr(0, rest.find(' '));
}

}  // namespace

int DistanceBucket(double dist, int buckets) {
  int b = static_cast<int>(std::floor(dist * buckets));
  return std::clamp(b, 0, buckets - 1);
}

PivotSet::PivotSet(std::vector<std::vector<TokenSet>> pivots, PivotParams params)
    : pivots_(std::move(pivots)), params_(params) {
  for (const auto& p : pivots_)
    if (p.empty()) throw Error(ErrorCode::kEmptyDomain, "attribute without pivots");
}

std::vector<double> PivotSet::Convert(const TokenSet& value, int attr,
                                      const DistanceFn& dist) const {
  std::vector<double> out;
  out.reserve(pivots_[attr].size());
  for (const auto& p : pivots_[attr]) out.push_back(dist(value, p));
  return out;
}

std::string PivotSet::Serialize() const {
  std::ostringstream os;
  for (std::size_t x = 0; x < pivots_.size(); ++x)
    for (std::size_t a = 0; a < pivots_[x].size(); ++a)
      os << "PIVOT attr=" << x << " idx=" << a << " tokens=" << pivots_[x][a].Join("+") << '\n';
  return os.str();
}

PivotSet PivotSet::Parse(std::string_view text, PivotParams params) {
  std::map<int, std::map<int, TokenSet>> found;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.substr(0, 6) != "PIVOT ") continue;
    int x = std::stoi(std::string(FieldValue(line, "attr")));
    int a = std::stoi(std::string(FieldValue(line, "idx")));
    std::vector<std::string> toks;
    std::string tok;
    std::string raw(FieldValue(line, "tokens"));
    std::istringstream is(raw);
    while (std::getline(is, tok, '+')) toks.push_back(tok);
    found[x].insert_or_assign(a, TokenSet(std::move(toks)));
  }
  std::vector<std::vector<TokenSet>> pivots;
  for (const auto& [x, byidx] : found) {
    if (x != static_cast<int>(pivots.size()))
      throw Error(ErrorCode::kParseError, "PIVOT attributes not contiguous");
    std::vector<TokenSet> list;
    for (const auto& [a, v] : byidx) {
      if (a != static_cast<int>(list.size()))
        throw Error(ErrorCode::kParseError, "PIVOT indexes not contiguous");
      list.push_back(v);
    }
    pivots.push_back(std::move(list));
  }
  return PivotSet(std::move(pivots), params);
}

double Entropy(const TokenSet& candidate, int attr, const Repository& repo, int buckets,
               const DistanceFn& dist) {
  return JointEntropy(std::span<const TokenSet>(&candidate, 1), attr, repo, buckets, dist);
}

double JointEntropy(std::span<const TokenSet> pivots, int attr, const Repository& repo,
                    int buckets, const DistanceFn& dist) {
  if (buckets < 2) throw Error(ErrorCode::kConfigError, "need at least 2 buckets");
  if (repo.empty()) throw Error(ErrorCode::kConfigError, "repository is empty");
  std::map<std::vector<int>, long> hist;
  for (std::size_t s = 0; s < repo.size(); ++s) {
    std::vector<int> key;
    for (const auto& p : pivots) key.push_back(DistanceBucket(dist(repo.Value(s, attr), p), buckets));
    ++hist[key];
  }
  return EntropyOfCounts(hist, static_cast<long>(repo.size()));
}

PivotSet SelectPivots(const Repository& repo, const PivotParams& params, const DistanceFn& dist) {
  if (repo.empty()) throw Error(ErrorCode::kConfigError, "repository is empty");
  if (params.buckets < 2 || params.max_pivots < 1)
    throw Error(ErrorCode::kConfigError, "bad pivot parameters");
  const long total = static_cast<long>(repo.size());
  std::vector<std::vector<TokenSet>> chosen(repo.dims());
  for (int x = 0; x < repo.dims(); ++x) {
    const auto& dom = repo.Domain(x);
    const auto& counts = repo.DomainCounts(x);
    if (dom.empty()) throw Error(ErrorCode::kEmptyDomain, "empty domain");
    // Bucket codes of every domain value under the pivots chosen so far.
    std::vector<std::vector<int>> codes(dom.size());
    std::vector<bool> used(dom.size(), false);
    double current = 0.0;
    while (static_cast<int>(chosen[x].size()) < params.max_pivots) {
      if (!chosen[x].empty() && current >= params.entropy_min) break;
      int best = -1;
      double best_h = -1.0;
      std::vector<int> best_col;
      const std::size_t stride =
          params.candidate_limit == 0 || dom.size() <= params.candidate_limit
              ? 1
              : (dom.size() + params.candidate_limit - 1) / params.candidate_limit;
      for (std::size_t c = 0; c < dom.size(); c += stride) {
        if (used[c]) continue;
        auto d = DomainDistancesTo(repo, x, dom[c], dist);
        std::vector<int> col(dom.size());
        for (std::size_t v = 0; v < dom.size(); ++v) col[v] = DistanceBucket(d[v], params.buckets);
        double h = JointEntropyOf(codes, col, counts, total);
        if (h > best_h + 1e-12) {
          best_h = h;
          best = static_cast<int>(c);
          best_col = std::move(col);
        }
      }
      if (best < 0) break;  // domain exhausted
      used[best] = true;
      chosen[x].push_back(dom[best]);
      for (std::size_t v = 0; v < dom.size(); ++v) codes[v].push_back(best_col[v]);
      current = best_h;
    }
  }
  return PivotSet(std::move(chosen), params);
}

}  // namespace terids
