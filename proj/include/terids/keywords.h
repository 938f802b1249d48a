#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "terids/model.h"

namespace terids {

// Bit vector over an ordered keyword list: bit i is set when keyword i is
// (possibly) present.
class KeywordMask {
 public:
  KeywordMask() = default;
  explicit KeywordMask(std::size_t bits) : words_((bits + 63) / 64, 0) {}

  void Set(std::size_t i) {
    if (words_.size() <= i / 64) words_.resize(i / 64 + 1, 0);
    words_[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  bool Test(std::size_t i) const {
    return i / 64 < words_.size() && ((words_[i / 64] >> (i % 64)) & 1u);
  }
  bool Any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }
  void Or(const KeywordMask& o) {
    if (words_.size() < o.words_.size()) words_.resize(o.words_.size(), 0);
    for (std::size_t i = 0; i < o.words_.size(); ++i) words_[i] |= o.words_[i];
  }
  // True when every bit of `o` is also set here.
  bool Covers(const KeywordMask& o) const {
    for (std::size_t i = 0; i < o.words_.size(); ++i) {
      std::uint64_t mine = i < words_.size() ? words_[i] : 0;
      if ((o.words_[i] & ~mine) != 0) return false;
    }
    return true;
  }
  std::string ToString() const;

  bool operator==(const KeywordMask& o) const { return Covers(o) && o.Covers(*this); }

 private:
  std::vector<std::uint64_t> words_;
};

// Bits of the keywords (sorted list) that occur in `t`.
KeywordMask MaskOf(const TokenSet& t, std::span<const std::string> keywords);

}  // namespace terids
