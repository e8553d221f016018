#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "roiml/corpus.hpp"
#include "roiml/error.hpp"
#include "roiml/harness.hpp"
#include "roiml/random.hpp"
#include "roiml/report.hpp"
#include "roiml/roi.hpp"
#include "roiml/synthetic.hpp"
#include "support.hpp"

using namespace roiml;
using namespace roiml::harness;
using testing::curve_with;
using testing::error_code_of;

namespace {

const std::vector<double> kFive = {0.1, 0.2, 0.3, 0.4, 0.5};
const std::vector<double> kEight = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};

struct Fixture {
  corpus::PairCorpus corpus;
  corpus::SplitPlan plan;
};

Fixture small_fixture(std::size_t pairs = 200, std::uint64_t seed = 21) {
  synthetic::SeparableConfig cfg;
  cfg.pairs = pairs;
  Fixture f{synthetic::separable_corpus(cfg, seed), {}};
  f.plan = corpus::split(f.corpus, 0.2, seed);
  return f;
}

ForestSpec quick_forest() {
  ForestSpec spec;
  spec.forest.trees = 20;
  spec.tuning = TuningMode::None;
  return spec;
}

// Perfect predictions on the test set of `f`.
classify::PredictionSet truth(const Fixture& f) {
  classify::PredictionSet p;
  for (auto idx : f.plan.test_set) {
    const int y = f.corpus.pairs[idx].label.value();
    p.rows.push_back({std::to_string(idx), y, y, std::nullopt});
  }
  return p;
}

// Curve with real confusion matrices, priced under `p`.
LearningCurve priced(const std::vector<ConfusionMatrix>& cms, const roi::CostParameters& p) {
  LearningCurve c;
  c.technique_label = "t";
  for (std::size_t i = 0; i < cms.size(); ++i) {
    CurvePoint pt;
    pt.fraction = 0.1 * static_cast<double>(i + 1);
    pt.n_train = 100 * (i + 1);
    pt.n_test = cms[i].total();
    pt.cm = cms[i];
    c.points.push_back(pt);
  }
  return reprice(c, p);
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("max ROI picks the argmax with ties toward the smaller fraction") {
    const auto m = max_roi_point(curve_with("a", kFive, {-5, -1, 2, 30, 28}));
    CHECK(m.fraction == 0.4);
    CHECK(m.roi == 30.0);
    CHECK(max_roi_point(curve_with("a", {0.1, 0.2, 0.3}, {4, 4, 4})).fraction == 0.1);
    CHECK(max_roi_point(curve_with("a", {0.3}, {-2})).fraction == 0.3);
    CHECK(error_code_of([] { max_roi_point(LearningCurve{}); }) == ErrorCode::Curve);
  }

  TEST_CASE("break-even on the grid and interpolated") {
    const auto be = break_even(curve_with("a", {0.1, 0.2, 0.3, 0.4}, {-5, -1, 2, 30}));
    REQUIRE(be);
    CHECK(be->grid_fraction == 0.3);
    CHECK(be->interpolated_fraction == doctest::Approx(0.2 + 0.1 / 3.0).epsilon(1e-12));

    const auto first = break_even(curve_with("a", {0.1, 0.2}, {1, 2}));
    REQUIRE(first);
    CHECK(first->grid_fraction == 0.1);
    CHECK(first->interpolated_fraction == 0.1);

    CHECK(!break_even(curve_with("a", {0.1, 0.2}, {-1, -2})));
  }

  TEST_CASE("crossover reports sign changes of a - b") {
    const std::vector<double> grid = {0.1, 0.2, 0.3};
    const auto a = curve_with("a", grid, {1, 2, 3});
    const auto b = curve_with("b", grid, {2, 2, 2});
    CHECK(crossover(a, b, Metric::Roi) == std::vector<double>{0.3});
    CHECK(crossover(a, a, Metric::Roi).empty());
    const auto below = curve_with("c", grid, {0, 1, 1.5});
    CHECK(crossover(below, b, Metric::Roi).empty());
  }

  TEST_CASE("crossover on the F1 series") {
    const std::vector<double> grid = {0.1, 0.2, 0.3, 0.4};
    const auto a = curve_with("a", grid, {}, {0.5, 0.6, 0.8, 0.7});
    const auto b = curve_with("b", grid, {}, {0.6, 0.6, 0.7, 0.75});
    // a - b: -, 0, +, -  -> changes at 0.3 (vs last nonzero sign) and 0.4
    CHECK(crossover(a, b, Metric::F1) == std::vector<double>{0.3, 0.4});
  }

  TEST_CASE("crossover on mismatched grids is a comparability error") {
    const auto a = curve_with("a", {0.1, 0.2}, {1, 2});
    const auto b = curve_with("b", {0.1, 0.3}, {1, 2});
    CHECK(error_code_of([&] { crossover(a, b, Metric::Roi); }) == ErrorCode::Comparability);
  }

  TEST_CASE("intersect_grids keeps common fractions and warns") {
    const auto a = curve_with("a", {0.1, 0.2, 0.3}, {1, 2, 3});
    const auto b = curve_with("b", {0.2, 0.3, 0.4}, {2.5, 2.5, 2.5});
    std::vector<std::string> warnings;
    const auto [x, y] = intersect_grids(a, b, warnings);
    CHECK(x.points.size() == 2);
    CHECK(y.points.size() == 2);
    CHECK(!warnings.empty());
    CHECK(crossover(x, y, Metric::Roi) == std::vector<double>{0.3});
  }

  TEST_CASE("diminishing returns scans suffix maxima") {
    const auto c = curve_with("a", kFive, {}, {0.5, 0.7, 0.79, 0.80, 0.805});
    CHECK(diminishing_returns(c, Metric::F1, 0.01) == 0.4);
    const auto linear = curve_with("a", kFive, {}, {0.1, 0.2, 0.3, 0.4, 0.5});
    CHECK(!diminishing_returns(linear, Metric::F1, 1e-6));
    const auto flat = curve_with("a", kFive, {}, {0.6, 0.6, 0.6, 0.6, 0.6});
    CHECK(diminishing_returns(flat, Metric::F1, 0.01) == 0.1);
    CHECK(error_code_of([&] { diminishing_returns(flat, Metric::F1, 0.0); }) == ErrorCode::Parameter);
  }

  TEST_CASE("scenario with doubled cost_fn adds exactly fn * cost_fn to the penalty") {
    const roi::CostParameters base;
    const auto c = priced({{40, 5, 7, 48}, {44, 4, 3, 49}, {46, 2, 1, 51}}, base);
    auto doubled = base;
    doubled.cost_fn *= 2;
    const auto results = scenario_analysis(c, {{"fn-x2", doubled}, {"same", base}});
    REQUIRE(results.size() == 2);
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      const auto& p = c.points[i];
      CHECK(results[0].curve.points[i].econ.penalty_usd ==
            p.econ.penalty_usd + static_cast<double>(p.cm.fn) * base.cost_fn);
    }
    CHECK(to_json(results[1].summary) == to_json(summarize(c)));
  }

  TEST_CASE("scenario with zero product value makes benefit the negative penalty") {
    const roi::CostParameters base;
    const auto c = priced({{40, 5, 7, 48}, {44, 4, 3, 49}}, base);
    auto zero = base;
    zero.value_prod = 0.0;
    const auto before = report::emit_curve_csv(c);
    const auto results = scenario_analysis(c, {{"no-value", zero}});
    for (const auto& p : results[0].curve.points) CHECK(p.econ.benefit_usd == -p.econ.penalty_usd);
    CHECK(report::emit_curve_csv(c) == before);
  }

  TEST_CASE("scenario errors name the scenario") {
    const auto c = priced({{1, 1, 1, 1}}, {});
    roi::CostParameters bad;
    bad.n_hr = 0;
    auto body = [&] { scenario_analysis(c, {{"broken", bad}}); };
    CHECK(error_code_of(body) == ErrorCode::Parameter);
    CHECK(testing::error_message_of(body).find("broken") != std::string::npos);
    CHECK(error_code_of([&] { scenario_analysis(c, {}); }) == ErrorCode::Parameter);
  }

  TEST_CASE("reprice reproduces stored economics bit for bit") {
    const roi::CostParameters p = roi::preset("desk-scale");
    const auto c = priced({{40, 5, 7, 48}, {44, 4, 3, 49}, {46, 2, 1, 51}}, p);
    const auto again = reprice(c, p);
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      CHECK(again.points[i].econ == c.points[i].econ);
      CHECK(again.points[i].f1 == c.points[i].f1);
    }
  }

  TEST_CASE("processed counts per iteration and cumulative") {
    const auto c = priced({{1, 0, 0, 1}, {1, 0, 0, 1}, {1, 0, 0, 1}}, {});
    CHECK(processed_counts(c.points, CostMode::PerIteration) == std::vector<std::int64_t>{102, 202, 302});
    CHECK(processed_counts(c.points, CostMode::Cumulative) == std::vector<std::int64_t>{102, 304, 606});
  }

  TEST_CASE("run_curve produces one point per fraction with growing cost") {
    const auto f = small_fixture();
    const auto r = run_curve(f.corpus, f.plan, kEight, quick_forest(), roi::preset("desk-scale"), "rf");
    REQUIRE(r.curve.points.size() == 8);
    CHECK(r.warnings.empty());
    CHECK(r.model_metadata.size() == 8);
    for (std::size_t i = 0; i < r.curve.points.size(); ++i) {
      const auto& p = r.curve.points[i];
      CHECK(p.n_train == corpus::round_half_up(200 * kEight[i]));
      CHECK(p.n_test == 40);
      CHECK(p.cm.total() == 40);
      CHECK(p.econ.n_processed == static_cast<std::int64_t>(p.n_train + p.n_test));
      if (i > 0) CHECK(p.econ.cost_usd > r.curve.points[i - 1].econ.cost_usd);
    }
  }

  TEST_CASE("run_curve is deterministic and matches manual evaluation") {
    const auto f = small_fixture();
    const auto params = roi::preset("desk-scale");
    const auto a = run_curve(f.corpus, f.plan, {0.2, 0.6}, quick_forest(), params, "rf");
    const auto b = run_curve(f.corpus, f.plan, {0.2, 0.6}, quick_forest(), params, "rf");
    CHECK(report::emit_curve_csv(a.curve) == report::emit_curve_csv(b.curve));

    // Second point rebuilt by hand with the same per-fraction seed.
    const auto schedule = corpus::fraction_schedule(f.corpus, f.plan, {0.2, 0.6});
    std::vector<std::string> train, test;
    std::vector<int> labels;
    for (auto i : schedule[1]) {
      train.push_back(f.corpus.pairs[i].combined_text);
      labels.push_back(f.corpus.pairs[i].label.value());
    }
    for (auto i : f.plan.test_set) test.push_back(f.corpus.pairs[i].combined_text);
    const auto spec = quick_forest();
    auto preds = classify::train_random_forest(train, labels, spec.forest, spec.vectorizer, derive_seed(f.plan.seed, 1))
                     .predict(test);
    for (std::size_t r = 0; r < preds.rows.size(); ++r) {
      preds.rows[r].true_label = f.corpus.pairs[f.plan.test_set[r]].label.value();
    }
    CHECK(classify::evaluate(preds) == a.curve.points[1].cm);
  }

  TEST_CASE("single-fraction schedule gives a single point") {
    const auto f = small_fixture();
    NaiveBayesSpec nb;
    const auto r = run_curve(f.corpus, f.plan, {0.5}, nb, roi::preset("desk-scale"), "nb");
    CHECK(r.curve.points.size() == 1);
  }

  TEST_CASE("external predictions for 3 of 8 fractions give 3 points and a warning") {
    const auto f = small_fixture();
    ExternalSpec ext;
    for (double fr : {0.2, 0.5, 0.8}) ext.by_fraction.emplace_back(fr, truth(f));
    const auto r = run_curve(f.corpus, f.plan, kEight, ext, roi::preset("desk-scale"), "bert");
    REQUIRE(r.curve.points.size() == 3);
    CHECK(r.curve.points[1].fraction == 0.5);
    CHECK(r.curve.points[1].cm.fp == 0);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("0.1") != std::string::npos);
    CHECK(r.warnings[0].find("0.7") != std::string::npos);
  }

  TEST_CASE("external predictions that disagree with the test set abort the curve") {
    const auto f = small_fixture();
    ExternalSpec ext;
    auto wrong = truth(f);
    wrong.rows[0].true_label = 1 - *wrong.rows[0].true_label;
    ext.by_fraction.emplace_back(0.4, wrong);
    auto body = [&] { run_curve(f.corpus, f.plan, {0.4}, ext, roi::preset("desk-scale"), "bert"); };
    CHECK(error_code_of(body) == ErrorCode::Evaluation);
    CHECK(testing::error_message_of(body).find("0.400000") != std::string::npos);
  }

  TEST_CASE("training failure names the fraction") {
    const auto f = small_fixture();
    NaiveBayesSpec nb;
    nb.alpha = 0.0;
    auto body = [&] { run_curve(f.corpus, f.plan, {0.3}, nb, roi::preset("desk-scale"), "nb"); };
    CHECK(error_code_of(body) == ErrorCode::Parameter);
    CHECK(testing::error_message_of(body).find("fraction 0.300000") != std::string::npos);
  }

  TEST_CASE("tuning once records the chosen forest") {
    const auto f = small_fixture(120);
    ForestSpec spec = quick_forest();
    spec.tuning = TuningMode::Once;
    spec.grid.trees = {5, 10};
    spec.grid.max_depths = {0};
    spec.grid.folds = 3;
    const auto r = run_curve(f.corpus, f.plan, {0.4, 0.8}, spec, roi::preset("desk-scale"), "rf");
    REQUIRE(r.tuned);
    CHECK((r.tuned->trees == 5 || r.tuned->trees == 10));
  }

  TEST_CASE("repeated runs report mean and spread per fraction") {
    const auto f = small_fixture();
    NaiveBayesSpec nb;
    const auto rows =
        run_repeated(f.corpus, 0.2, {0.2, 0.6}, nb, roi::preset("desk-scale"), {1, 2, 3}, CostMode::PerIteration);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].fraction == 0.2);
    CHECK(rows[0].f1_sd >= 0.0);
    CHECK(rows[1].f1_mean > 0.0);
  }

  TEST_CASE("curve CSV read back reprices identically") {
    const auto p = roi::CostParameters{};
    const auto c = priced({{40, 5, 7, 48}, {44, 4, 3, 49}}, p);
    const auto back = read_curve_csv(report::emit_curve_csv(c), "t", p);
    REQUIRE(back.points.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(back.points[i].cm == c.points[i].cm);
      CHECK(back.points[i].econ == c.points[i].econ);
    }
  }

  TEST_CASE("curve CSV with inconsistent counts is rejected") {
    const std::string text =
        "fraction,n_train,n_test,tp,fp,fn,tn,precision,recall,f1,cost_usd,penalty_usd,benefit_usd,roi\n"
        "0.1,10,5,1,1,1,1,0,0,0,0,0,0,0\n";
    CHECK(error_code_of([&] { read_curve_csv(text, "x", {}); }) == ErrorCode::Curve);
  }

  TEST_CASE("decision summary JSON lists every quantity") {
    const auto a = curve_with("a", kFive, {-5, -1, 2, 30, 28}, {0.5, 0.7, 0.79, 0.8, 0.805});
    const auto b = curve_with("b", kFive, {0, 0, 0, 0, 0}, {0.6, 0.6, 0.6, 0.6, 0.9});
    const auto s = summarize(a, {&b});
    CHECK(s.max_roi.fraction == 0.4);
    REQUIRE(s.crossovers.size() == 1);
    CHECK(s.crossovers[0].rival == "b");
    const auto json = to_json(s);
    for (const char* key : {"max_roi", "break_even", "diminishing_returns", "crossovers"}) {
      CHECK(json.find(key) != std::string::npos);
    }
  }
}
