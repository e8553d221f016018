#include <cmath>

#include "roiml/classify.hpp"
#include "roiml/error.hpp"

namespace roiml::classify {

NaiveBayes NaiveBayes::fit(std::span<const SparseVector> counts, std::span<const int> labels,
                           std::size_t n_features, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::Parameter, "classify", "naive Bayes smoothing alpha must be > 0");
  }
  if (counts.size() != labels.size()) {
    throw Error(ErrorCode::Fit, "classify", "feature rows and labels differ in length");
  }
  check_class_counts(labels, 1);

  NaiveBayes nb;
  nb.alpha_ = alpha;
  double docs[2] = {0.0, 0.0};
  std::vector<double> term_counts[2] = {std::vector<double>(n_features, 0.0),
                                        std::vector<double>(n_features, 0.0)};
  double totals[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const int c = labels[i];
    docs[c] += 1.0;
    for (const auto& [col, value] : counts[i]) {
      term_counts[c][col] += value;
      totals[c] += value;
    }
  }
  const double n = docs[0] + docs[1];
  for (int c = 0; c < 2; ++c) {
    nb.log_prior_[c] = std::log(docs[c] / n);
    const double denom = totals[c] + alpha * static_cast<double>(n_features);
    nb.log_likelihood_[c].resize(n_features);
    for (std::size_t t = 0; t < n_features; ++t) {
      nb.log_likelihood_[c][t] = std::log((term_counts[c][t] + alpha) / denom);
    }
  }
  return nb;
}

std::pair<double, double> NaiveBayes::log_joint(const SparseVector& counts) const {
  double joint[2] = {log_prior_[0], log_prior_[1]};
  for (const auto& [col, value] : counts) {
    for (int c = 0; c < 2; ++c) joint[c] += value * log_likelihood_[c][col];
  }
  return {joint[1], joint[0]};
}

std::pair<double, double> NaiveBayes::posterior(const SparseVector& counts) const {
  auto [l1, l0] = log_joint(counts);
  const double m = std::max(l1, l0);
  const double e1 = std::exp(l1 - m);
  const double e0 = std::exp(l0 - m);
  const double p1 = e1 / (e1 + e0);
  return {p1, 1.0 - p1};
}

}  // namespace roiml::classify
