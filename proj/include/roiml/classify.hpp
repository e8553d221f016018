#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "roiml/confusion_matrix.hpp"

namespace roiml::classify {

/// (column, value) entries sorted by column.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

/// Whitespace tokens of a cleaned text, without the pair separator token.
std::vector<std::string_view> tokenize(std::string_view text);

struct VectorizerConfig {
  std::size_t min_df = 2;
  std::size_t max_vocabulary = 5000;  // 0 = unbounded
  bool smooth_idf = true;
};

/// Unigram TF-IDF. Vocabulary comes from the fitting texts only; columns are
/// assigned in lexicographic term order.
class FeatureVectorizer {
 public:
  static FeatureVectorizer fit(std::span<const std::string> texts, const VectorizerConfig& config = {});

  /// Raw term counts over the vocabulary.
  SparseVector counts(std::string_view text) const;
  /// tf * idf, L2-normalised. Texts with no known terms map to the empty vector.
  SparseVector transform(std::string_view text) const;

  std::size_t size() const { return terms_.size(); }
  std::size_t n_documents() const { return n_documents_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const VectorizerConfig& config() const { return config_; }

  std::optional<std::uint32_t> column(std::string_view term) const;
  std::size_t document_frequency(std::string_view term) const;
  double idf(std::uint32_t column) const { return idf_[column]; }

 private:
  VectorizerConfig config_;
  std::size_t n_documents_ = 0;
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct ForestConfig {
  std::size_t trees = 100;
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t min_samples_leaf = 1;
  std::size_t threads = 0;    // 0 = hardware concurrency
};

/// Bagged CART ensemble with Gini splits and ceil(sqrt(d)) candidate features
/// per node. Votes are per tree; ties go to label 0.
class RandomForest {
 public:
  static RandomForest fit(std::span<const SparseVector> rows, std::span<const int> labels,
                          std::size_t n_features, const ForestConfig& config, std::uint64_t seed);

  /// Number of trees voting for label 1.
  std::size_t votes(const SparseVector& row) const;
  std::size_t size() const { return trees_.size(); }

  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // go left when value <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    int label = 0;
  };
  using Tree = std::vector<Node>;

  const std::vector<Tree>& trees() const { return trees_; }

 private:
  std::vector<Tree> trees_;
};

/// Multinomial naive Bayes over raw term counts with additive smoothing.
class NaiveBayes {
 public:
  static NaiveBayes fit(std::span<const SparseVector> counts, std::span<const int> labels,
                        std::size_t n_features, double alpha = 1.0);

  /// Log joint likelihood per class (unnormalised log posterior).
  std::pair<double, double> log_joint(const SparseVector& counts) const;
  /// Posterior of class 1 and class 0; they sum to one.
  std::pair<double, double> posterior(const SparseVector& counts) const;

  double alpha() const { return alpha_; }

 private:
  double alpha_ = 1.0;
  double log_prior_[2] = {0.0, 0.0};
  std::vector<double> log_likelihood_[2];
};

enum class ModelKind { RandomForest, NaiveBayes };
std::string_view to_string(ModelKind kind);

struct PredictionRow {
  std::string pair_id;
  std::optional<int> true_label;
  int predicted_label = 0;
  std::optional<double> score;
};

struct PredictionSet {
  std::vector<PredictionRow> rows;

  std::size_t size() const { return rows.size(); }
};

struct TrainingMetadata {
  std::uint64_t seed = 0;
  std::size_t n_train = 0;
  ForestConfig forest;
  double alpha = 1.0;
};

class TrainedModel {
 public:
  TrainedModel(ModelKind kind, FeatureVectorizer vectorizer, std::variant<RandomForest, NaiveBayes> model,
               TrainingMetadata metadata);

  /// One row per text in input order; pair ids are "0", "1", ... and true
  /// labels are absent. Score is the fraction of trees voting 1 (forest) or
  /// the class-1 posterior (naive Bayes).
  PredictionSet predict(std::span<const std::string> texts) const;

  ModelKind kind() const { return kind_; }
  const FeatureVectorizer& vectorizer() const { return vectorizer_; }
  const TrainingMetadata& metadata() const { return metadata_; }

  /// kind, seed, hyperparameters, n_train, vocabulary_size.
  std::string metadata_json() const;

 private:
  ModelKind kind_;
  FeatureVectorizer vectorizer_;
  std::variant<RandomForest, NaiveBayes> model_;
  TrainingMetadata metadata_;
};

/// Throws DegenerateData unless both classes have at least `min_per_class` examples.
void check_class_counts(std::span<const int> labels, std::size_t min_per_class);

TrainedModel train_random_forest(std::span<const std::string> texts, std::span<const int> labels,
                                 const ForestConfig& forest, const VectorizerConfig& vectorizer,
                                 std::uint64_t seed);

TrainedModel train_naive_bayes(std::span<const std::string> texts, std::span<const int> labels,
                               double alpha, const VectorizerConfig& vectorizer);

struct TuningGrid {
  std::vector<std::size_t> trees = {50, 100, 200};
  std::vector<std::size_t> max_depths = {0, 16};
  std::size_t folds = 10;
};

struct TuningResult {
  ForestConfig best;
  double best_f1 = 0.0;
  /// Mean cross-validated F1 per (trees, max_depth) in grid order.
  std::vector<std::pair<ForestConfig, double>> scores;
};

/// Grid search by mean F1 under stratified k-fold cross-validation. The
/// vectorizer is refitted on every training fold. Ties keep the earlier grid
/// entry, i.e. the smaller forest.
TuningResult tune_random_forest(std::span<const std::string> texts, std::span<const int> labels,
                                const TuningGrid& grid, const ForestConfig& base,
                                const VectorizerConfig& vectorizer, std::uint64_t seed);

/// Stratified fold assignment (fold index per example).
std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed);

struct ExternalPredictions {
  PredictionSet predictions;
  bool has_score_column = false;
};

/// Reads the interchange CSV: pair_id,true_label,predicted_label[,score].
ExternalPredictions load_external_predictions(std::string_view csv_text);

std::string write_predictions_csv(const PredictionSet& predictions);

ConfusionMatrix evaluate(const PredictionSet& predictions);

}  // namespace roiml::classify
