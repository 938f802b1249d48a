#include "terids/cdd.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace terids {
namespace {

constexpr int kBuckets = 10;

double BucketLo(int b) { return b / 10.0; }
double BucketHi(int b) { return (b + 1) / 10.0; }

// Buckets below `usable` whose closed interval contains `d`: one, or two on a
// boundary.
void BucketsFor(double d, int usable, std::vector<int>& out) {
  out.clear();
  int b = static_cast<int>(std::floor(d * kBuckets));
  for (int c = b - 1; c <= b + 1; ++c) {
    if (c < 0 || c >= usable) continue;
    if (BucketLo(c) <= d && d <= BucketHi(c)) out.push_back(c);
  }
}

struct Accum {
  double lo = 1e300;
  double hi = -1e300;
  long support = 0;

  void Add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    ++support;
  }
};

// Per-attribute matrix of pairwise distances between domain values.
std::vector<std::vector<double>> DomainDistances(const Repository& repo, int attr,
                                                 const DistanceFn& dist) {
  const auto& dom = repo.Domain(attr);
  std::vector<std::vector<double>> m(dom.size(), std::vector<double>(dom.size(), 0.0));
  for (std::size_t a = 0; a < dom.size(); ++a)
    for (std::size_t b = a + 1; b < dom.size(); ++b) m[a][b] = m[b][a] = dist(dom[a], dom[b]);
  return m;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double ParseDouble(std::string_view s) {
  s = Trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::kParseError, "bad number '" + std::string(s) + "'");
  return v;
}

int ParseInt(std::string_view s) {
  s = Trim(s);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::kParseError, "bad integer '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> Split(std::string_view s, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + sep.size();
  }
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<int> CddRule::DeterminantAttrs() const {
  std::vector<int> out;
  for (const auto& c : determinants)
    if (!c.IsMissing()) out.push_back(c.attr);
  return out;
}

void ValidateRule(const CddRule& rule) {
  if (rule.determinants.empty()) throw Error(ErrorCode::kConfigError, "rule has no determinants");
  int prev = -1;
  for (const auto& c : rule.determinants) {
    if (c.attr <= prev) throw Error(ErrorCode::kConfigError, "determinants not sorted/unique");
    prev = c.attr;
    if (c.attr == rule.dependent)
      throw Error(ErrorCode::kConfigError, "dependent attribute among determinants");
    if (const auto* iv = std::get_if<IntervalConstraint>(&c.kind)) {
      if (!(0.0 <= iv->eps_min && iv->eps_min <= iv->eps_max && iv->eps_max <= 1.0))
        throw Error(ErrorCode::kConfigError, "bad determinant interval");
    }
  }
  if (!(rule.dep_interval.lb <= rule.dep_interval.ub))
    throw Error(ErrorCode::kConfigError, "bad dependent interval");
}

bool RuleApplicable(const CddRule& rule, const StreamTuple& r) {
  for (const auto& c : rule.determinants) {
    if (c.IsMissing()) continue;
    if (!r.attrs[c.attr]) return false;
    if (const auto* k = std::get_if<ConstantConstraint>(&c.kind))
      if (*r.attrs[c.attr] != k->value) return false;
  }
  return true;
}

bool SatisfiesDeterminants(const CddRule& rule, const StreamTuple& r, const StreamTuple& s,
                           const DistanceFn& dist) {
  for (const auto& c : rule.determinants) {
    if (c.IsMissing()) continue;
    const auto& rv = r.attrs[c.attr];
    if (!rv)
      throw Error(ErrorCode::kDeterminantMissing,
                  "tuple " + r.rid + " lacks determinant " + std::to_string(c.attr));
    const auto& sv = s.attrs[c.attr];
    if (!sv) return false;
    if (const auto* k = std::get_if<ConstantConstraint>(&c.kind)) {
      if (*rv != k->value || *sv != k->value) return false;
    } else {
      const auto& iv = std::get<IntervalConstraint>(c.kind);
      if (!iv.Admits(dist(*rv, *sv))) return false;
    }
  }
  return true;
}

std::vector<CddRule> DetectCdds(const Repository& repo, const DetectParams& params,
                                const DistanceFn& dist) {
  if (repo.empty()) throw Error(ErrorCode::kNoRulesFound, "repository is empty");
  if (!(params.max_interval_width > 0.0 && params.max_interval_width <= 1.0))
    throw Error(ErrorCode::kConfigError, "max_interval_width must be in (0,1]");
  if (params.min_support < 2) throw Error(ErrorCode::kConfigError, "min_support must be >= 2");
  if (!(params.max_determinant_distance > 0.0 && params.max_determinant_distance <= 1.0))
    throw Error(ErrorCode::kConfigError, "max_determinant_distance must be in (0,1]");
  if (params.max_samples > 0 && repo.size() > params.max_samples) {
    std::vector<StreamTuple> head(repo.samples().begin(),
                                  repo.samples().begin() + params.max_samples);
    return DetectCdds(Repository(std::move(head)), params, dist);
  }

  const int d = repo.dims();
  const std::size_t n = repo.size();
  const int usable = std::clamp(
      static_cast<int>(std::ceil(params.max_determinant_distance * kBuckets - 1e-9)), 1, kBuckets);
  std::vector<std::vector<std::vector<double>>> dd(d);
  for (int x = 0; x < d; ++x) dd[x] = DomainDistances(repo, x, dist);

  auto pair_dist = [&](int x, std::size_t a, std::size_t b) {
    return dd[x][repo.ValueId(a, x)][repo.ValueId(b, x)];
  };
  auto acceptable = [&](const Accum& acc) {
    return acc.support >= params.min_support &&
           acc.hi - acc.lo <= params.max_interval_width + 1e-12;
  };

  std::vector<CddRule> rules;
  std::vector<int> buckets;
  for (int j = 0; j < d; ++j) {
    // An attribute is interval-typed for j when some single-attribute
    // bucketed dependency x -> j is tight enough; otherwise it contributes
    // constants.
    std::vector<bool> interval_typed(d, false);
    for (int x = 0; x < d; ++x) {
      if (x == j) continue;
      std::vector<Accum> acc(usable);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
          BucketsFor(pair_dist(x, a, b), usable, buckets);
          double dep = pair_dist(j, a, b);
          for (int c : buckets) acc[c].Add(dep);
        }
      interval_typed[x] = std::any_of(acc.begin(), acc.end(), acceptable);
    }

    std::vector<std::vector<int>> det_sets;
    for (int x = 0; x < d; ++x) {
      if (x == j) continue;
      det_sets.push_back({x});
      for (int y = x + 1; y < d; ++y)
        if (y != j) det_sets.push_back({x, y});
    }

    for (const auto& xs : det_sets) {
      // Key per attribute: bucket index for interval attrs, value id for
      // constant attrs.
      std::map<std::vector<int>, Accum> groups;
      std::vector<std::vector<int>> options(xs.size());
      std::vector<int> key(xs.size());
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) {
          bool ok = true;
          for (std::size_t i = 0; i < xs.size() && ok; ++i) {
            int x = xs[i];
            if (interval_typed[x]) {
              BucketsFor(pair_dist(x, a, b), usable, options[i]);
            } else {
              options[i].clear();
              if (repo.ValueId(a, x) == repo.ValueId(b, x))
                options[i].push_back(repo.ValueId(a, x));
            }
            ok = !options[i].empty();
          }
          if (!ok) continue;
          double dep = pair_dist(j, a, b);
          // Cartesian product over at most 2 x 2 options.
          std::size_t total = 1;
          for (const auto& o : options) total *= o.size();
          for (std::size_t combo = 0; combo < total; ++combo) {
            std::size_t rest = combo;
            for (std::size_t i = 0; i < xs.size(); ++i) {
              key[i] = options[i][rest % options[i].size()];
              rest /= options[i].size();
            }
            groups[key].Add(dep);
          }
        }
      }

      for (const auto& [k, acc] : groups) {
        if (!acceptable(acc)) continue;
        CddRule rule;
        rule.dependent = j;
        rule.dep_interval = {acc.lo, acc.hi};
        bool frequent = true;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          int x = xs[i];
          if (interval_typed[x]) {
            rule.determinants.push_back({x, IntervalConstraint{BucketLo(k[i]), BucketHi(k[i])}});
          } else {
            if (repo.DomainCounts(x)[k[i]] < params.min_support) frequent = false;
            rule.determinants.push_back({x, ConstantConstraint{repo.Domain(x)[k[i]]}});
          }
        }
        if (frequent) rules.push_back(std::move(rule));
      }
    }
  }
  if (rules.empty())
    throw Error(ErrorCode::kNoRulesFound, "no rule met support/width thresholds");
  return rules;
}

std::string FormatRule(const CddRule& rule) {
  std::ostringstream os;
  os << "DEP=" << rule.dependent;
  for (const auto& c : rule.determinants) {
    os << " | " << c.attr << ':';
    if (const auto* k = std::get_if<ConstantConstraint>(&c.kind)) {
      os << "CONST:" << k->value.Join("+");
    } else if (const auto* iv = std::get_if<IntervalConstraint>(&c.kind)) {
      os << (iv->min_exclusive ? "INTX:" : "INT:") << FormatDouble(iv->eps_min) << ','
         << FormatDouble(iv->eps_max);
    } else {
      os << "MISSING";
    }
  }
  os << " -> [" << FormatDouble(rule.dep_interval.lb) << ','
     << FormatDouble(rule.dep_interval.ub) << ']';
  return os.str();
}

CddRule ParseRule(std::string_view line) {
  auto halves = Split(line, " -> ");
  if (halves.size() != 2) throw Error(ErrorCode::kParseError, "rule lacks ' -> '");
  CddRule rule;
  auto parts = Split(halves[0], " | ");
  auto head = Trim(parts[0]);
  if (head.substr(0, 4) != "DEP=") throw Error(ErrorCode::kParseError, "rule lacks DEP=");
  rule.dependent = ParseInt(head.substr(4));
  for (std::size_t i = 1; i < parts.size(); ++i) {
    auto fields = Split(Trim(parts[i]), ":");
    if (fields.size() < 2) throw Error(ErrorCode::kParseError, "bad constraint");
    AttrConstraint c;
    c.attr = ParseInt(fields[0]);
    if (fields[1] == "CONST" && fields.size() == 3) {
      std::vector<std::string> toks;
      for (auto t : Split(fields[2], "+")) toks.emplace_back(t);
      c.kind = ConstantConstraint{TokenSet(std::move(toks))};
    } else if ((fields[1] == "INT" || fields[1] == "INTX") && fields.size() == 3) {
      auto nums = Split(fields[2], ",");
      if (nums.size() != 2) throw Error(ErrorCode::kParseError, "bad interval");
      c.kind = IntervalConstraint{ParseDouble(nums[0]), ParseDouble(nums[1]), fields[1] == "INTX"};
    } else if (fields[1] == "MISSING") {
      c.kind = MissingMarker{};
    } else {
      throw Error(ErrorCode::kParseError, "unknown constraint kind");
    }
    rule.determinants.push_back(std::move(c));
  }
  auto tail = Trim(halves[1]);
  if (tail.size() < 2 || tail.front() != '[' || tail.back() != ']')
    throw Error(ErrorCode::kParseError, "bad dependent interval");
  auto nums = Split(tail.substr(1, tail.size() - 2), ",");
  if (nums.size() != 2) throw Error(ErrorCode::kParseError, "bad dependent interval");
  rule.dep_interval = {ParseDouble(nums[0]), ParseDouble(nums[1])};
  ValidateRule(rule);
  return rule;
}

std::string SerializeRules(std::span<const CddRule> rules) {
  std::string out;
  for (const auto& r : rules) {
    out += FormatRule(r);
    out += '\n';
  }
  return out;
}

std::vector<CddRule> ParseRules(std::string_view text) {
  std::vector<CddRule> out;
  for (auto line : Split(text, "\n")) {
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (line.substr(0, 4) != "DEP=") continue;
    out.push_back(ParseRule(line));
  }
  return out;
}

}  // namespace terids
