#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "roiml/classify.hpp"
#include "roiml/csv.hpp"
#include "roiml/error.hpp"
#include "roiml/random.hpp"
#include "roiml/roi.hpp"

namespace roiml::classify {
namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(code, "classify", message);
}

std::vector<SparseVector> transform_all(const FeatureVectorizer& v, std::span<const std::string> texts,
                                        bool raw_counts) {
  std::vector<SparseVector> rows;
  rows.reserve(texts.size());
  for (const auto& t : texts) rows.push_back(raw_counts ? v.counts(t) : v.transform(t));
  return rows;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::RandomForest ? "random_forest" : "naive_bayes";
}

TrainedModel::TrainedModel(ModelKind kind, FeatureVectorizer vectorizer,
                           std::variant<RandomForest, NaiveBayes> model, TrainingMetadata metadata)
    : kind_(kind), vectorizer_(std::move(vectorizer)), model_(std::move(model)), metadata_(metadata) {}

PredictionSet TrainedModel::predict(std::span<const std::string> texts) const {
  PredictionSet out;
  out.rows.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    PredictionRow row;
    row.pair_id = std::to_string(i);
    if (const auto* forest = std::get_if<RandomForest>(&model_)) {
      const auto ones = forest->votes(vectorizer_.transform(texts[i]));
      row.predicted_label = 2 * ones > forest->size() ? 1 : 0;
      row.score = static_cast<double>(ones) / static_cast<double>(forest->size());
    } else {
      const auto& nb = std::get<NaiveBayes>(model_);
      const auto counts = vectorizer_.counts(texts[i]);
      auto [l1, l0] = nb.log_joint(counts);
      row.predicted_label = l1 > l0 ? 1 : 0;
      row.score = nb.posterior(counts).first;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string TrainedModel::metadata_json() const {
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(kind_));
  j["seed"] = metadata_.seed;
  nlohmann::ordered_json hyper;
  if (kind_ == ModelKind::RandomForest) {
    hyper["trees"] = metadata_.forest.trees;
    hyper["max_depth"] = metadata_.forest.max_depth;
    hyper["min_samples_leaf"] = metadata_.forest.min_samples_leaf;
  } else {
    hyper["alpha"] = metadata_.alpha;
  }
  hyper["min_df"] = vectorizer_.config().min_df;
  hyper["max_vocabulary"] = vectorizer_.config().max_vocabulary;
  hyper["smooth_idf"] = vectorizer_.config().smooth_idf;
  j["hyperparameters"] = hyper;
  j["n_train"] = metadata_.n_train;
  j["vocabulary_size"] = vectorizer_.size();
  return j.dump(2);
}

TrainedModel train_random_forest(std::span<const std::string> texts, std::span<const int> labels,
                                 const ForestConfig& forest, const VectorizerConfig& vectorizer,
                                 std::uint64_t seed) {
  if (texts.size() != labels.size()) fail(ErrorCode::Fit, "texts and labels differ in length");
  check_class_counts(labels, 2);
  auto v = FeatureVectorizer::fit(texts, vectorizer);
  const auto rows = transform_all(v, texts, false);
  auto model = RandomForest::fit(rows, labels, v.size(), forest, seed);
  TrainingMetadata meta;
  meta.seed = seed;
  meta.n_train = texts.size();
  meta.forest = forest;
  return TrainedModel(ModelKind::RandomForest, std::move(v), std::move(model), meta);
}

TrainedModel train_naive_bayes(std::span<const std::string> texts, std::span<const int> labels,
                               double alpha, const VectorizerConfig& vectorizer) {
  if (texts.size() != labels.size()) fail(ErrorCode::Fit, "texts and labels differ in length");
  if (!(alpha > 0.0)) fail(ErrorCode::Parameter, "naive Bayes smoothing alpha must be > 0");
  check_class_counts(labels, 1);
  auto v = FeatureVectorizer::fit(texts, vectorizer);
  const auto rows = transform_all(v, texts, true);
  auto model = NaiveBayes::fit(rows, labels, v.size(), alpha);
  TrainingMetadata meta;
  meta.n_train = texts.size();
  meta.alpha = alpha;
  return TrainedModel(ModelKind::NaiveBayes, std::move(v), std::move(model), meta);
}

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) fail(ErrorCode::Parameter, "cross-validation needs at least 2 folds");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] ? 1 : 0].push_back(i);
  Rng rng(seed);
  std::vector<std::size_t> assignment(labels.size(), 0);
  std::size_t offset = 0;
  for (auto& members : by_class) {
    rng.shuffle(std::span(members));
    // Continue the round-robin across classes so fold sizes stay within one.
    for (std::size_t k = 0; k < members.size(); ++k) assignment[members[k]] = (offset + k) % folds;
    offset += members.size();
  }
  return assignment;
}

TuningResult tune_random_forest(std::span<const std::string> texts, std::span<const int> labels,
                                const TuningGrid& grid, const ForestConfig& base,
                                const VectorizerConfig& vectorizer, std::uint64_t seed) {
  if (grid.trees.empty() || grid.max_depths.empty()) fail(ErrorCode::Parameter, "empty tuning grid");
  check_class_counts(labels, 2);
  std::size_t smallest_class = 0;
  {
    std::size_t ones = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    smallest_class = std::min(ones, labels.size() - ones);
  }
  // Every training fold must keep two examples per class.
  const std::size_t folds = std::max<std::size_t>(2, std::min(grid.folds, smallest_class / 2));
  const auto assignment = stratified_folds(labels, folds, derive_seed(seed, 0xF01D));

  struct Fold {
    FeatureVectorizer vectorizer;
    std::vector<SparseVector> train_rows, test_rows;
    std::vector<int> train_labels, test_labels;
  };
  std::vector<Fold> prepared;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::string> train_texts;
    std::vector<std::string> test_texts;
    Fold fold;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      if (assignment[i] == f) {
        test_texts.push_back(texts[i]);
        fold.test_labels.push_back(labels[i]);
      } else {
        train_texts.push_back(texts[i]);
        fold.train_labels.push_back(labels[i]);
      }
    }
    fold.vectorizer = FeatureVectorizer::fit(train_texts, vectorizer);
    fold.train_rows = transform_all(fold.vectorizer, train_texts, false);
    fold.test_rows = transform_all(fold.vectorizer, test_texts, false);
    prepared.push_back(std::move(fold));
  }

  auto trees = grid.trees;
  std::sort(trees.begin(), trees.end());
  TuningResult result;
  bool have_best = false;
  for (auto n_trees : trees) {
    for (auto depth : grid.max_depths) {
      ForestConfig config = base;
      config.trees = n_trees;
      config.max_depth = depth;
      double sum = 0.0;
      for (std::size_t f = 0; f < folds; ++f) {
        const auto& fold = prepared[f];
        auto forest = RandomForest::fit(fold.train_rows, fold.train_labels, fold.vectorizer.size(), config,
                                        derive_seed(seed, f));
        ConfusionMatrix cm;
        for (std::size_t i = 0; i < fold.test_rows.size(); ++i) {
          const int predicted = 2 * forest.votes(fold.test_rows[i]) > forest.size() ? 1 : 0;
          const int truth = fold.test_labels[i];
          if (truth && predicted) ++cm.tp;
          else if (!truth && predicted) ++cm.fp;
          else if (truth) ++cm.fn;
          else ++cm.tn;
        }
        sum += roi::f1_score(cm);
      }
      const double mean = sum / static_cast<double>(folds);
      result.scores.emplace_back(config, mean);
      if (!have_best || mean > result.best_f1) {
        have_best = true;
        result.best_f1 = mean;
        result.best = config;
      }
    }
  }
  return result;
}

ExternalPredictions load_external_predictions(std::string_view csv_text) {
  auto rows = csv::parse(csv_text, "classify");
  if (rows.empty()) fail(ErrorCode::Schema, "prediction file is empty");
  const auto& header = rows.front().fields;
  const std::vector<std::string> with_score = {"pair_id", "true_label", "predicted_label", "score"};
  const std::vector<std::string> without_score = {"pair_id", "true_label", "predicted_label"};
  ExternalPredictions out;
  if (header == with_score) {
    out.has_score_column = true;
  } else if (header != without_score) {
    fail(ErrorCode::Schema, "prediction header must be pair_id,true_label,predicted_label[,score]");
  }

  std::unordered_set<std::string> ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::string where = " at row " + std::to_string(r) + " (line " + std::to_string(rows[r].line) + ")";
    if (f.size() != header.size()) fail(ErrorCode::Schema, "wrong field count" + where);
    PredictionRow row;
    row.pair_id = f[0];
    if (row.pair_id.empty()) fail(ErrorCode::Schema, "empty pair_id" + where);
    if (!ids.insert(row.pair_id).second) fail(ErrorCode::Schema, "duplicate pair_id '" + row.pair_id + "'" + where);
    auto binary = [&](const std::string& cell, const char* name) {
      if (cell != "0" && cell != "1") fail(ErrorCode::Schema, std::string(name) + " must be 0 or 1" + where);
      return cell == "1" ? 1 : 0;
    };
    row.true_label = binary(f[1], "true_label");
    row.predicted_label = binary(f[2], "predicted_label");
    if (out.has_score_column && !f[3].empty()) {
      double score = 0.0;
      try {
        std::size_t used = 0;
        score = std::stod(f[3], &used);
        if (used != f[3].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        fail(ErrorCode::Schema, "score is not a number" + where);
      }
      if (!(score >= 0.0 && score <= 1.0)) fail(ErrorCode::Schema, "score outside [0, 1]" + where);
      row.score = score;
    }
    out.predictions.rows.push_back(std::move(row));
  }
  return out;
}

std::string write_predictions_csv(const PredictionSet& predictions) {
  std::string out = "pair_id,true_label,predicted_label,score\n";
  for (const auto& row : predictions.rows) {
    out += csv::format_row({row.pair_id, row.true_label ? std::to_string(*row.true_label) : std::string{},
                            std::to_string(row.predicted_label),
                            row.score ? csv::format_decimal(*row.score) : std::string{}});
  }
  return out;
}

ConfusionMatrix evaluate(const PredictionSet& predictions) {
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predictions.rows.size(); ++i) {
    const auto& row = predictions.rows[i];
    if (!row.true_label) {
      throw Error(ErrorCode::Evaluation, "classify", "row " + std::to_string(i) + " ('" + row.pair_id +
                                                         "') has no true label");
    }
    const bool truth = *row.true_label == 1;
    const bool predicted = row.predicted_label == 1;
    if (truth && predicted) ++cm.tp;
    else if (!truth && predicted) ++cm.fp;
    else if (truth) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

}  // namespace roiml::classify
