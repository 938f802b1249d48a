#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "terids/io.h"

namespace terids {

struct SyntheticParams {
  int dims = 4;
  int streams = 2;
  int length = 2000;        // tuples per stream
  int vocab = 400;
  int topics = 20;
  int repo_size = 10000;
  int categories = 4;       // per topic
  int variants = 3;         // spellings of each category value
  int max_value_size = 8;   // tokens per value, drawn from [2, max]
  double common_share = 0.05;  // vocabulary fraction shared by all topics
  double common_rate = 0.5;    // chance each extra token of a value is a shared one
  double duplicate_rate = 0.6;
  double noise = 0.15;      // per-attribute chance a stream tuple uses another variant
  int keyword_count = 1;    // taken from topic 0
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  RawTable repository;
  std::vector<RawTable> streams;
  std::vector<std::vector<std::string>> entities;  // per stream row: entity label
  std::vector<std::string> keywords;
};

// Clustered tuples. Each topic owns a vocabulary slice; the remaining common
// tokens are shared with Zipf-like weights. A category fixes a few variant
// values per attribute, an entity picks one variant index for all its
// attributes, and stream observations swap single attributes to another
// variant with probability `noise`. Repository samples are noise-free
// entities. Deterministic under `seed`.
SyntheticCorpus GenerateSynthetic(const SyntheticParams& p);

}  // namespace terids
