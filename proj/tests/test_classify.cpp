#include <doctest.h>

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "roiml/classify.hpp"
#include "roiml/corpus.hpp"
#include "roiml/error.hpp"
#include "roiml/roi.hpp"
#include "roiml/synthetic.hpp"
#include "support.hpp"

using namespace roiml;
using namespace roiml::classify;
using testing::error_code_of;

namespace {

struct Data {
  std::vector<std::string> texts;
  std::vector<int> labels;
};

Data take(const corpus::PairCorpus& c, const std::vector<std::size_t>& idx) {
  Data d;
  for (auto i : idx) {
    d.texts.push_back(c.pairs[i].combined_text);
    d.labels.push_back(c.pairs[i].label.value());
  }
  return d;
}

Data all_of(const corpus::PairCorpus& c) {
  std::vector<std::size_t> idx(c.size());
  std::iota(idx.begin(), idx.end(), 0);
  return take(c, idx);
}

double f1_against(const PredictionSet& p, const std::vector<int>& truth) {
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int y = truth[i];
    const int yhat = p.rows[i].predicted_label;
    if (y == 1 && yhat == 1) ++cm.tp;
    if (y == 0 && yhat == 1) ++cm.fp;
    if (y == 1 && yhat == 0) ++cm.fn;
    if (y == 0 && yhat == 0) ++cm.tn;
  }
  return roi::f1_score(cm);
}

double sample_variance(const std::vector<double>& xs) {
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

VectorizerConfig keep_everything() {
  VectorizerConfig v;
  v.min_df = 1;
  return v;
}

}  // namespace

TEST_SUITE("classify") {
  TEST_CASE("tokenize splits on spaces and drops the pair separator") {
    const auto t = tokenize("alpha beta [SEP] gamma");
    REQUIRE(t.size() == 3);
    CHECK(t[0] == "alpha");
    CHECK(t[2] == "gamma");
    CHECK(tokenize("").empty());
  }

  TEST_CASE("vectorizer vocabulary and document frequency") {
    const std::vector<std::string> texts = {"a b", "b c"};
    const auto v = FeatureVectorizer::fit(texts, keep_everything());
    CHECK(v.size() == 3);
    CHECK(v.terms() == std::vector<std::string>{"a", "b", "c"});
    CHECK(v.document_frequency("b") == 2);
    CHECK(v.document_frequency("a") == 1);

    VectorizerConfig strict;
    strict.min_df = 2;
    const auto only_b = FeatureVectorizer::fit(texts, strict);
    CHECK(only_b.terms() == std::vector<std::string>{"b"});
  }

  TEST_CASE("smoothed idf of a term present in every document is one") {
    const std::vector<std::string> texts = {"a b", "b c"};
    const auto v = FeatureVectorizer::fit(texts, keep_everything());
    CHECK(v.idf(*v.column("b")) == doctest::Approx(std::log(3.0 / 3.0) + 1.0));
    CHECK(v.idf(*v.column("a")) == doctest::Approx(std::log(3.0 / 2.0) + 1.0));
  }

  TEST_CASE("vectorizer caps the vocabulary by document frequency") {
    const std::vector<std::string> texts = {"a b c", "a b", "a"};
    VectorizerConfig v = keep_everything();
    v.max_vocabulary = 2;
    CHECK(FeatureVectorizer::fit(texts, v).terms() == std::vector<std::string>{"a", "b"});
  }

  TEST_CASE("transform is L2-normalised and unknown terms vanish") {
    const std::vector<std::string> texts = {"a b", "b c"};
    const auto v = FeatureVectorizer::fit(texts, keep_everything());
    const auto x = v.transform("a a b zzz");
    double norm = 0.0;
    for (const auto& [col, val] : x) norm += val * val;
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v.transform("zzz yyy").empty());
    CHECK(!v.column("zzz"));
  }

  TEST_CASE("fitting a vectorizer on nothing is a fit error") {
    const std::vector<std::string> none;
    CHECK(error_code_of([&] { FeatureVectorizer::fit(none); }) == ErrorCode::Fit);
  }

  TEST_CASE("forest fits a separable corpus almost perfectly") {
    synthetic::SeparableConfig cfg;
    cfg.pairs = 200;
    const auto c = synthetic::separable_corpus(cfg, 11);
    const auto d = all_of(c);
    const auto model = train_random_forest(d.texts, d.labels, ForestConfig{}, VectorizerConfig{}, 5);
    CHECK(f1_against(model.predict(d.texts), d.labels) >= 0.99);
  }

  TEST_CASE("forest on shuffled labels scores near chance") {
    synthetic::SeparableConfig cfg;
    cfg.pairs = 400;
    const auto c = synthetic::separable_corpus(cfg, 12);
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto d = all_of(c);
      testing::SplitMix gen(seed + 100);
      for (std::size_t i = d.labels.size(); i > 1; --i) std::swap(d.labels[i - 1], d.labels[gen.range(0, i - 1)]);
      Data train, test;
      for (std::size_t i = 0; i < d.texts.size(); ++i) {
        Data& into = (i % 5 == 0) ? test : train;
        into.texts.push_back(d.texts[i]);
        into.labels.push_back(d.labels[i]);
      }
      ForestConfig f;
      f.trees = 50;
      const auto model = train_random_forest(train.texts, train.labels, f, VectorizerConfig{}, seed);
      total += f1_against(model.predict(test.texts), test.labels);
    }
    const double mean = total / 10.0;
    CHECK(mean >= 0.4);
    CHECK(mean <= 0.6);
  }

  TEST_CASE("forest training is deterministic per seed") {
    synthetic::SeparableConfig cfg;
    cfg.pairs = 200;
    const auto c = synthetic::separable_corpus(cfg, 13);
    const auto d = all_of(c);
    ForestConfig f;
    f.trees = 30;
    f.threads = 4;
    const auto a = train_random_forest(d.texts, d.labels, f, VectorizerConfig{}, 77).predict(d.texts);
    f.threads = 1;
    const auto b = train_random_forest(d.texts, d.labels, f, VectorizerConfig{}, 77).predict(d.texts);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.rows[i].predicted_label == b.rows[i].predicted_label);
      CHECK(a.rows[i].score == b.rows[i].score);
    }
  }

  TEST_CASE("forest memorises a training positive") {
    const std::vector<std::string> texts = {"alpha beta", "alpha beta", "gamma delta", "gamma delta"};
    const std::vector<int> labels = {1, 1, 0, 0};
    const auto model = train_random_forest(texts, labels, ForestConfig{}, keep_everything(), 3);
    const std::vector<std::string> probe = {"alpha beta"};
    const auto p = model.predict(probe);
    CHECK(p.rows[0].predicted_label == 1);
    CHECK(*p.rows[0].score >= 0.5);
  }

  TEST_CASE("single-class training data is degenerate") {
    const std::vector<std::string> texts = {"a b", "b c", "c d"};
    const std::vector<int> labels = {1, 1, 1};
    CHECK(error_code_of([&] { train_random_forest(texts, labels, ForestConfig{}, keep_everything(), 1); }) ==
          ErrorCode::DegenerateData);
    CHECK(error_code_of([&] { train_naive_bayes(texts, labels, 1.0, keep_everything()); }) ==
          ErrorCode::DegenerateData);
  }

  TEST_CASE("more trees never make held-out F1 noisier") {
    synthetic::SeparableConfig cfg;
    cfg.pairs = 400;
    const auto c = synthetic::separable_corpus(cfg, 14);
    const auto plan = corpus::split(c, 0.2, 14);
    const auto train = take(c, plan.train_pool);
    const auto test = take(c, plan.test_set);
    auto spread = [&](std::size_t trees) {
      std::vector<double> f1s;
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        ForestConfig f;
        f.trees = trees;
        f1s.push_back(f1_against(
            train_random_forest(train.texts, train.labels, f, VectorizerConfig{}, seed).predict(test.texts),
            test.labels));
      }
      return sample_variance(f1s);
    };
    CHECK(spread(100) <= spread(1));
  }

  TEST_CASE("naive Bayes posterior for x x matches the hand computation") {
    // P(x|1) = (1+1)/(1+2) = 2/3, P(x|0) = 1/3, equal priors:
    // posterior(1) = (4/9) / (4/9 + 1/9) = 0.8
    const std::vector<std::string> texts = {"x", "y"};
    const std::vector<int> labels = {1, 0};
    const auto model = train_naive_bayes(texts, labels, 1.0, keep_everything());
    const std::vector<std::string> probe = {"x x", "q"};
    const auto p = model.predict(probe);
    CHECK(p.rows[0].predicted_label == 1);
    CHECK(*p.rows[0].score == doctest::Approx(0.8).epsilon(1e-12));
    // No known terms and equal priors: a tie, resolved to 0.
    CHECK(p.rows[1].predicted_label == 0);
    CHECK(*p.rows[1].score == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("naive Bayes rejects non-positive smoothing") {
    const std::vector<std::string> texts = {"x", "y"};
    const std::vector<int> labels = {1, 0};
    CHECK(error_code_of([&] { train_naive_bayes(texts, labels, 0.0, keep_everything()); }) == ErrorCode::Parameter);
    CHECK(error_code_of([&] { train_naive_bayes(texts, labels, -1.0, keep_everything()); }) == ErrorCode::Parameter);
  }

  TEST_CASE("naive Bayes posteriors sum to one") {
    synthetic::SeparableConfig cfg;
    cfg.pairs = 200;
    const auto c = synthetic::separable_corpus(cfg, 15);
    const auto d = all_of(c);
    const auto v = FeatureVectorizer::fit(d.texts);
    std::vector<SparseVector> counts;
    for (const auto& t : d.texts) counts.push_back(v.counts(t));
    const auto nb = NaiveBayes::fit(counts, d.labels, v.size(), 1.0);
    for (const auto& x : counts) {
      const auto [p1, p0] = nb.posterior(x);
      CHECK(std::fabs(p1 + p0 - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("prediction keeps order and handles empty input") {
    const std::vector<std::string> texts = {"x", "y"};
    const std::vector<int> labels = {1, 0};
    const auto model = train_naive_bayes(texts, labels, 1.0, keep_everything());
    const std::vector<std::string> none;
    CHECK(model.predict(none).size() == 0);
    const std::vector<std::string> probe = {"y", "x", "y y"};
    const auto p = model.predict(probe);
    CHECK(p.rows[0].predicted_label == 0);
    CHECK(p.rows[1].predicted_label == 1);
    CHECK(p.rows[2].predicted_label == 0);
    CHECK(p.rows[1].pair_id == "1");
    CHECK(!p.rows[1].true_label);
  }

  TEST_CASE("test texts never reach the vocabulary") {
    const std::vector<std::string> texts = {"x", "y"};
    const std::vector<int> labels = {1, 0};
    const auto model = train_naive_bayes(texts, labels, 1.0, keep_everything());
    const std::vector<std::string> probe = {"brand new words"};
    (void)model.predict(probe);
    CHECK(model.vectorizer().size() == 2);
    CHECK(!model.vectorizer().column("brand"));
  }

  TEST_CASE("model metadata describes the training run") {
    const std::vector<std::string> texts = {"x", "y"};
    const std::vector<int> labels = {1, 0};
    const auto json = train_naive_bayes(texts, labels, 1.0, keep_everything()).metadata_json();
    for (const char* key : {"\"kind\"", "\"n_train\"", "\"vocabulary_size\"", "\"seed\""}) {
      CHECK(json.find(key) != std::string::npos);
    }
  }

  TEST_CASE("stratified folds spread each class evenly") {
    std::vector<int> labels(40);
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i < 20 ? 1 : 0;
    const auto folds = stratified_folds(labels, 10, 3);
    std::vector<int> pos(10), neg(10);
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg)[folds[i]]++;
    for (int k = 0; k < 10; ++k) {
      CHECK(pos[k] == 2);
      CHECK(neg[k] == 2);
    }
  }

  TEST_CASE("tuning picks the best mean F1 and prefers the smaller forest on ties") {
    synthetic::SeparableConfig cfg;
    cfg.pairs = 120;
    const auto c = synthetic::separable_corpus(cfg, 16);
    const auto d = all_of(c);
    TuningGrid grid;
    grid.trees = {5, 10};
    grid.max_depths = {0, 4};
    grid.folds = 3;
    const auto r = tune_random_forest(d.texts, d.labels, grid, ForestConfig{}, VectorizerConfig{}, 9);
    REQUIRE(r.scores.size() == 4);
    double best = -1.0;
    std::size_t first_best = 0;
    for (std::size_t i = 0; i < r.scores.size(); ++i) {
      if (r.scores[i].second > best) {
        best = r.scores[i].second;
        first_best = i;
      }
    }
    CHECK(r.best_f1 == best);
    CHECK(r.best.trees == r.scores[first_best].first.trees);
    CHECK(r.best.max_depth == r.scores[first_best].first.max_depth);
  }

  TEST_CASE("interchange CSV loads valid rows") {
    const auto e = load_external_predictions("pair_id,true_label,predicted_label,score\n1,1,1,0.9\n2,0,1,0.6\n3,0,0,\n");
    CHECK(e.predictions.size() == 3);
    CHECK(e.has_score_column);
    CHECK(*e.predictions.rows[0].score == 0.9);
    CHECK(!e.predictions.rows[2].score);
  }

  TEST_CASE("interchange CSV without score column is accepted") {
    const auto e = load_external_predictions("pair_id,true_label,predicted_label\n1,1,0\n");
    CHECK(e.predictions.size() == 1);
    CHECK(!e.has_score_column);
    CHECK(!e.predictions.rows[0].score);
  }

  TEST_CASE("non-binary label is a schema error at that row") {
    const std::string text = "pair_id,true_label,predicted_label,score\n1,1,1,0.5\n2,0,2,0.5\n";
    auto body = [&] { load_external_predictions(text); };
    CHECK(error_code_of(body) == ErrorCode::Schema);
    CHECK(testing::error_message_of(body).find("row 2") != std::string::npos);
  }

  TEST_CASE("duplicate pair id and bad header are schema errors") {
    CHECK(error_code_of([] { load_external_predictions("pair_id,true_label,predicted_label\n1,1,1\n1,0,0\n"); }) ==
          ErrorCode::Schema);
    CHECK(error_code_of([] { load_external_predictions("id,truth,prediction\n1,1,1\n"); }) == ErrorCode::Schema);
    CHECK(error_code_of([] { load_external_predictions("pair_id,true_label,predicted_label,score\n1,1,1,1.5\n"); }) ==
          ErrorCode::Schema);
  }

  TEST_CASE("prediction CSV round-trips") {
    const auto e = load_external_predictions("pair_id,true_label,predicted_label,score\n4,1,1,0.25\n9,0,0,\n");
    const auto again = load_external_predictions(write_predictions_csv(e.predictions));
    CHECK(evaluate(again.predictions) == evaluate(e.predictions));
    CHECK(*again.predictions.rows[0].score == 0.25);
  }

  TEST_CASE("evaluate counts each cell of the confusion matrix") {
    PredictionSet p;
    const int pairs[4][2] = {{1, 1}, {0, 1}, {1, 0}, {0, 0}};
    for (int i = 0; i < 4; ++i) p.rows.push_back({std::to_string(i), pairs[i][0], pairs[i][1], std::nullopt});
    CHECK(evaluate(p) == ConfusionMatrix{1, 1, 1, 1});

    PredictionSet ok;
    for (int i = 0; i < 10; ++i) ok.rows.push_back({std::to_string(i), i % 2, i % 2, std::nullopt});
    CHECK(evaluate(ok) == ConfusionMatrix{5, 0, 0, 5});
  }

  TEST_CASE("evaluate matches a counting oracle on random rows") {
    testing::SplitMix gen(2024);
    PredictionSet p;
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (int i = 0; i < 200; ++i) {
      const int y = gen.coin() ? 1 : 0;
      const int yhat = gen.coin() ? 1 : 0;
      p.rows.push_back({std::to_string(i), y, yhat, std::nullopt});
      if (y && yhat) ++tp;
      if (!y && yhat) ++fp;
      if (y && !yhat) ++fn;
      if (!y && !yhat) ++tn;
    }
    CHECK(evaluate(p) == ConfusionMatrix{tp, fp, fn, tn});
  }

  TEST_CASE("evaluate without true labels is an evaluation error") {
    PredictionSet p;
    p.rows.push_back({"1", std::nullopt, 1, std::nullopt});
    CHECK(error_code_of([&] { evaluate(p); }) == ErrorCode::Evaluation);
  }
}
