#include "terids/synthetic.h"

#include <algorithm>
#include <random>
#include <set>

namespace terids {
namespace {

using Value = std::vector<int>;  // token ids, sorted and distinct

struct Entity {
  int topic = 0;
  int category = 0;
  int variant = 0;

  std::string Label() const {
    return "t" + std::to_string(topic) + "c" + std::to_string(category) + "v" +
           std::to_string(variant);
  }
};

class Generator {
 public:
  explicit Generator(const SyntheticParams& p) : p_(p), rng_(p.seed) {
    common_ = static_cast<int>(p.vocab * p.common_share);
    slice_ = (p.vocab - common_) / p.topics;
    std::vector<double> w;
    for (int i = 0; i < common_; ++i) w.push_back(1.0 / (i + 1));
    if (common_ > 0) zipf_ = std::discrete_distribution<int>(w.begin(), w.end());

    values_.resize(p.topics);
    for (int t = 0; t < p.topics; ++t) {
      values_[t].resize(p.categories);
      for (int c = 0; c < p.categories; ++c) {
        values_[t][c].resize(p.dims);
        for (int x = 0; x < p.dims; ++x) values_[t][c][x] = Variants(t, Base(t));
      }
    }
  }

  Entity NewEntity() {
    return {Uniform(0, p_.topics - 1), Uniform(0, p_.categories - 1), Uniform(0, p_.variants - 1)};
  }

  std::vector<Value> Observe(const Entity& e, bool noisy) {
    std::vector<Value> out;
    for (int x = 0; x < p_.dims; ++x) {
      int v = e.variant;
      if (noisy && p_.variants > 1 && Coin(p_.noise)) {
        v = Uniform(0, p_.variants - 2);
        if (v >= e.variant) ++v;
      }
      out.push_back(values_[e.topic][e.category][x][v]);
    }
    return out;
  }

  bool Coin(double prob) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < prob; }
  int Uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

 private:
  int TopicToken(int topic) { return topic * slice_ + Uniform(0, slice_ - 1); }
  int CommonToken() { return p_.topics * slice_ + zipf_(rng_); }

  Value Base(int topic) {
    const int size = Uniform(2, std::min(p_.max_value_size, slice_));
    std::set<int> picked{TopicToken(topic)};
    // A bounded number of draws; repeats simply leave the value shorter.
    for (int i = 1; i < size; ++i)
      picked.insert(common_ > 0 && Coin(p_.common_rate) ? CommonToken() : TopicToken(topic));
    return {picked.begin(), picked.end()};
  }

  // Variant 0 is the base; the others swap one token for another of the same
  // kind, retried a few times to keep variants distinct.
  std::vector<Value> Variants(int topic, const Value& base) {
    std::vector<Value> out{base};
    const int topic_end = p_.topics * slice_;
    for (int k = 1; k < p_.variants; ++k) {
      Value v = base;
      for (int attempt = 0; attempt < 8; ++attempt) {
        std::set<int> s(base.begin(), base.end());
        const int victim = base[Uniform(0, static_cast<int>(base.size()) - 1)];
        s.erase(victim);
        s.insert(victim < topic_end || common_ == 0 ? TopicToken(topic) : CommonToken());
        v.assign(s.begin(), s.end());
        if (std::find(out.begin(), out.end(), v) == out.end()) break;
      }
      out.push_back(std::move(v));
    }
    return out;
  }

  const SyntheticParams& p_;
  std::mt19937_64 rng_;
  int common_ = 0;
  int slice_ = 1;
  std::discrete_distribution<int> zipf_;
  std::vector<std::vector<std::vector<std::vector<Value>>>> values_;  // [t][c][x][variant]
};

std::string Render(const Value& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(' ');
    out += "w" + std::to_string(v[i]);
  }
  return out;
}

}  // namespace

SyntheticCorpus GenerateSynthetic(const SyntheticParams& p) {
  if (p.dims < 1 || p.streams < 1 || p.length < 0 || p.vocab < 1 || p.topics < 1 ||
      p.repo_size < 1 || p.categories < 1 || p.variants < 1 || p.max_value_size < 2 ||
      p.keyword_count < 1)
    throw Error(ErrorCode::kConfigError, "synthetic parameters must be positive");
  if (!(p.common_share >= 0.0 && p.common_share < 1.0) ||
      !(p.common_rate >= 0.0 && p.common_rate <= 1.0))
    throw Error(ErrorCode::kConfigError, "common_share must be in [0,1), common_rate in [0,1]");
  if ((p.vocab - static_cast<int>(p.vocab * p.common_share)) / p.topics < 2)
    throw Error(ErrorCode::kConfigError, "each topic needs at least two tokens");
  Generator g(p);
  SyntheticCorpus out;

  out.repository.header = TableHeader(p.dims);
  for (int i = 0; i < p.repo_size; ++i) {
    std::vector<std::string> row{"r" + std::to_string(i), "0", "0"};
    for (const auto& v : g.Observe(g.NewEntity(), false)) row.push_back(Render(v));
    out.repository.rows.push_back(std::move(row));
  }

  for (int s = 0; s < p.streams; ++s) out.streams.push_back({TableHeader(p.dims), {}});
  out.entities.resize(p.streams);
  for (int t = 1; t <= p.length; ++t) {
    // One shared entity per timestamp; each stream observes it or a fresh one.
    const Entity shared = g.NewEntity();
    for (int s = 0; s < p.streams; ++s) {
      const Entity e = g.Coin(p.duplicate_rate) ? shared : g.NewEntity();
      std::vector<std::string> row{"s" + std::to_string(s) + "_" + std::to_string(t),
                                   std::to_string(s), std::to_string(t)};
      for (const auto& v : g.Observe(e, true)) row.push_back(Render(v));
      out.streams[s].rows.push_back(std::move(row));
      out.entities[s].push_back(e.Label());
    }
  }

  const int slice = (p.vocab - static_cast<int>(p.vocab * p.common_share)) / p.topics;
  const int k = std::min(p.keyword_count, slice);
  for (int i = 0; i < k; ++i) out.keywords.push_back("w" + std::to_string(i));
  return out;
}

}  // namespace terids
