#include "roiml/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "roiml/error.hpp"
#include "roiml/random.hpp"

namespace roiml::synthetic {
namespace {

constexpr const char* kSyllables[] = {"ka", "lo", "mi", "ne", "ru", "sa", "ti", "vo", "be", "du",
                                      "fa", "gi", "ho", "ju", "ze", "pa", "qui", "wen", "yor", "xal"};
constexpr std::size_t kSyllableCount = std::size(kSyllables);

// Distinct letters-only word per index.
std::string word(std::size_t index) {
  std::string w;
  do {
    w += kSyllables[index % kSyllableCount];
    index /= kSyllableCount;
  } while (index > 0);
  return w + "x";
}

class Zipf {
 public:
  Zipf(std::size_t n, double exponent) : cdf_(n) {
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      total += 1.0 / std::pow(static_cast<double>(k + 1), exponent);
      cdf_[k] = total;
    }
    for (auto& c : cdf_) c /= total;
  }

  std::size_t draw(Rng& rng) const {
    const double u = rng.unit();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return it == cdf_.end() ? cdf_.size() - 1 : static_cast<std::size_t>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace

corpus::PairCorpus separable_corpus(const SeparableConfig& config, std::uint64_t seed) {
  if (config.pairs < 4 || config.pairs % 2 != 0) {
    throw Error(ErrorCode::Parameter, "synthetic", "pair count must be even and at least 4");
  }
  if (config.words_per_side == 0 || config.signal_vocabulary == 0 || config.shared_vocabulary == 0) {
    throw Error(ErrorCode::Parameter, "synthetic", "vocabulary sizes and words per side must be positive");
  }
  Rng rng(seed);
  const Zipf signal(config.signal_vocabulary, config.zipf_exponent);
  const std::size_t pool_offset[2] = {config.shared_vocabulary + config.signal_vocabulary,
                                      config.shared_vocabulary};

  auto side = [&](int label, bool force_signal) {
    std::string text;
    for (std::size_t w = 0; w < config.words_per_side; ++w) {
      const bool from_signal = (force_signal && w == 0) || rng.unit() < config.signal_rate;
      const std::size_t index = from_signal ? pool_offset[label] + signal.draw(rng)
                                            : static_cast<std::size_t>(rng.below(config.shared_vocabulary));
      if (!text.empty()) text.push_back(' ');
      text += word(index);
    }
    return text;
  };

  std::vector<corpus::RequirementPair> positives;
  std::vector<corpus::RequirementPair> negatives;
  const std::size_t half = config.pairs / 2;
  for (std::size_t i = 0; i < config.pairs; ++i) {
    const int label = i < half ? 1 : 0;
    corpus::RequirementPair pair;
    pair.left = "s" + std::to_string(2 * i);
    pair.right = "s" + std::to_string(2 * i + 1);
    pair.label.kind = label ? corpus::DependencyKind::Requires : corpus::DependencyKind::None;
    const bool left_carries = rng.below(2) == 0;
    const std::string left = side(label, left_carries);
    const std::string right = side(label, !left_carries);
    pair.combined_text = left + " " + std::string(corpus::kPairSeparator) + " " + right;
    (label ? positives : negatives).push_back(std::move(pair));
  }
  return corpus::build_corpus(std::move(positives), std::move(negatives), derive_seed(seed, 1));
}

}  // namespace roiml::synthetic
