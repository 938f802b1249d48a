#include "terids/metric.h"

#include <charconv>
#include <cmath>
#include <optional>

namespace terids {
namespace {

std::optional<double> SingleNumber(const TokenSet& t) {
  if (t.size() != 1) return std::nullopt;
  const std::string& s = t.tokens().front();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

double DistanceFn::operator()(const TokenSet& a, const TokenSet& b) const {
  if (kind == DistanceKind::kJaccard) return JaccardDistance(a, b);
  auto x = SingleNumber(a);
  auto y = SingleNumber(b);
  if (x && y) return std::fabs(*x - *y);
  return a == b ? 0.0 : 1.0;
}

double JaccardSim(const TokenSet& a, const TokenSet& b) {
  const auto& ta = a.tokens();
  const auto& tb = b.tokens();
  std::size_t i = 0, j = 0, inter = 0;
  while (i < ta.size() && j < tb.size()) {
    int c = ta[i].compare(tb[j]);
    if (c == 0) {
      ++inter;
      ++i;
      ++j;
    } else if (c < 0) {
      ++i;
    } else {
      ++j;
    }
  }
  std::size_t uni = ta.size() + tb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double TupleSim(const StreamTuple& r, const StreamTuple& r2) {
  if (r.dims() != r2.dims())
    throw Error(ErrorCode::kIncompleteTuple, "tuples differ in arity");
  double sum = 0.0;
  for (std::size_t j = 0; j < r.dims(); ++j) {
    if (!r.attrs[j] || !r2.attrs[j])
      throw Error(ErrorCode::kIncompleteTuple, "attribute " + std::to_string(j) + " missing");
    sum += JaccardSim(*r.attrs[j], *r2.attrs[j]);
  }
  return sum;
}

double UbSimBySizeAttr(const SizeInterval& i, const SizeInterval& j) {
  if (i.min_size > j.max_size) return static_cast<double>(j.max_size) / i.min_size;
  if (i.max_size < j.min_size) return static_cast<double>(i.max_size) / j.min_size;
  return 1.0;
}

double UbSimBySize(std::span<const SizeInterval> si_i, std::span<const SizeInterval> si_j) {
  double sum = 0.0;
  for (std::size_t k = 0; k < si_i.size(); ++k) sum += UbSimBySizeAttr(si_i[k], si_j[k]);
  return sum;
}

double MinDist(const DistInterval& x, const DistInterval& y) {
  if (x.lb > y.ub) return x.lb - y.ub;
  if (y.lb > x.ub) return y.lb - x.ub;
  return 0.0;
}

double UbSimByPivot(std::span<const DistInterval> di_i, std::span<const DistInterval> di_j) {
  double sum = 0.0;
  for (std::size_t k = 0; k < di_i.size(); ++k) sum += MinDist(di_i[k], di_j[k]);
  return static_cast<double>(di_i.size()) - sum;
}

}  // namespace terids
