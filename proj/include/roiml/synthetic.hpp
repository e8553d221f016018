#pragma once

#include <cstddef>
#include <cstdint>

#include "roiml/corpus.hpp"

namespace roiml::synthetic {

struct SeparableConfig {
  std::size_t pairs = 2000;          // total, half of them dependent
  std::size_t words_per_side = 6;
  std::size_t signal_vocabulary = 300;  // per class
  std::size_t shared_vocabulary = 400;
  double signal_rate = 0.5;          // chance that a word comes from the class pool
  double zipf_exponent = 0.0;         // skew of the class pools
};

/// Two-cluster text corpus: every pair carries at least one word from its own
/// class pool and none from the other, so the classes are linearly separable
/// in bag-of-words space. Rare signal words make the learning curve gradual.
corpus::PairCorpus separable_corpus(const SeparableConfig& config, std::uint64_t seed);

}  // namespace roiml::synthetic
