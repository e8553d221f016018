#include "roiml/harness.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "roiml/csv.hpp"
#include "roiml/error.hpp"
#include "roiml/random.hpp"

namespace roiml::harness {
namespace {

constexpr double kFractionTolerance = 1e-9;

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(code, "harness", message);
}

bool same_fraction(double a, double b) { return std::fabs(a - b) <= kFractionTolerance; }

double metric_value(const CurvePoint& p, Metric metric) { return metric == Metric::F1 ? p.f1 : p.econ.roi; }

int sign(double x) { return (x > 0.0) - (x < 0.0); }

void require_points(const LearningCurve& curve, std::size_t minimum, const char* what) {
  if (curve.points.size() < minimum) {
    fail(ErrorCode::Curve, std::string(what) + " needs at least " + std::to_string(minimum) +
                               " curve point(s); '" + curve.technique_label + "' has " +
                               std::to_string(curve.points.size()));
  }
}

void attach_economics(LearningCurve& curve) {
  const auto n = processed_counts(curve.points, curve.cost_mode);
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    auto& p = curve.points[i];
    p.f1 = roi::f1_score(p.cm);
    p.econ = roi::economic_outcome(n[i], p.cm, curve.parameters);
  }
}

const classify::PredictionSet* find_external(const ExternalSpec& spec, double fraction) {
  for (const auto& [f, preds] : spec.by_fraction) {
    if (same_fraction(f, fraction)) return &preds;
  }
  return nullptr;
}

std::string fraction_list(const std::vector<double>& fractions) {
  std::string out;
  for (double f : fractions) {
    if (!out.empty()) out += ", ";
    out += csv::format_decimal(f);
  }
  return out;
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace

std::string_view to_string(CostMode mode) {
  return mode == CostMode::PerIteration ? "per_iteration" : "cumulative";
}

CostMode cost_mode_from_string(std::string_view name) {
  if (name == "per_iteration") return CostMode::PerIteration;
  if (name == "cumulative") return CostMode::Cumulative;
  fail(ErrorCode::Parameter, "unknown cost mode '" + std::string(name) + "'");
}

std::string_view to_string(TuningMode mode) {
  switch (mode) {
    case TuningMode::None: return "none";
    case TuningMode::Once: return "once";
    case TuningMode::EveryFraction: return "every_fraction";
  }
  return "none";
}

TuningMode tuning_mode_from_string(std::string_view name) {
  if (name == "none") return TuningMode::None;
  if (name == "once") return TuningMode::Once;
  if (name == "every_fraction") return TuningMode::EveryFraction;
  fail(ErrorCode::Parameter, "unknown tuning mode '" + std::string(name) + "'");
}

std::string_view to_string(Metric metric) { return metric == Metric::F1 ? "f1" : "roi"; }

std::vector<std::int64_t> processed_counts(const std::vector<CurvePoint>& points, CostMode mode) {
  std::vector<std::int64_t> n;
  std::int64_t running = 0;
  for (const auto& p : points) {
    const auto here = static_cast<std::int64_t>(p.n_train + p.n_test);
    running += here;
    n.push_back(mode == CostMode::PerIteration ? here : running);
  }
  return n;
}

CurveResult run_curve(const corpus::PairCorpus& corpus, const corpus::SplitPlan& plan,
                      const std::vector<double>& fractions, const TrainerSpec& trainer,
                      const roi::CostParameters& parameters, std::string technique_label, CostMode cost_mode) {
  if (fractions.empty()) fail(ErrorCode::Parameter, "fraction schedule is empty");
  roi::validate(parameters);
  const auto schedule = corpus::fraction_schedule(corpus, plan, fractions);

  CurveResult result;
  auto& curve = result.curve;
  curve.technique_label = std::move(technique_label);
  curve.seed = plan.seed;
  curve.parameters = parameters;
  curve.cost_mode = cost_mode;

  std::vector<std::string> test_texts;
  std::vector<int> test_labels;
  for (auto idx : plan.test_set) {
    test_texts.push_back(corpus.pairs[idx].combined_text);
    test_labels.push_back(corpus.pairs[idx].label.value());
  }

  auto subset = [&](const std::vector<std::size_t>& indices) {
    std::pair<std::vector<std::string>, std::vector<int>> out;
    for (auto idx : indices) {
      out.first.push_back(corpus.pairs[idx].combined_text);
      out.second.push_back(corpus.pairs[idx].label.value());
    }
    return out;
  };

  const auto* forest_spec = std::get_if<ForestSpec>(&trainer);
  std::optional<classify::ForestConfig> fixed_forest;
  if (forest_spec) {
    fixed_forest = forest_spec->forest;
    if (forest_spec->tuning == TuningMode::Once) {
      auto [texts, labels] = subset(schedule.back());
      try {
        auto tuned = classify::tune_random_forest(texts, labels, forest_spec->grid, forest_spec->forest,
                                                  forest_spec->vectorizer, derive_seed(plan.seed, 0x70E));
        fixed_forest = tuned.best;
        result.tuned = tuned.best;
      } catch (const Error& e) {
        throw Error(e.code(), "harness", "tuning at fraction " + csv::format_decimal(fractions.back()) +
                                             " failed: " + e.what());
      }
    }
  }

  std::vector<double> missing;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double fraction = fractions[i];
    classify::PredictionSet predictions;
    try {
      if (const auto* external = std::get_if<ExternalSpec>(&trainer)) {
        const auto* found = find_external(*external, fraction);
        if (!found) {
          missing.push_back(fraction);
          continue;
        }
        predictions = *found;
        if (predictions.size() != plan.test_set.size()) {
          fail(ErrorCode::Evaluation, "external predictions hold " + std::to_string(predictions.size()) +
                                          " rows but the test set has " + std::to_string(plan.test_set.size()));
        }
        std::map<std::string, int> expected;
        for (auto idx : plan.test_set) expected.emplace(std::to_string(idx), corpus.pairs[idx].label.value());
        for (const auto& row : predictions.rows) {
          auto it = expected.find(row.pair_id);
          if (it == expected.end()) {
            fail(ErrorCode::Evaluation, "external prediction for pair '" + row.pair_id + "' is not in the test set");
          }
          if (row.true_label && *row.true_label != it->second) {
            fail(ErrorCode::Evaluation, "external true_label for pair '" + row.pair_id + "' disagrees with the corpus");
          }
        }
      } else {
        auto [texts, labels] = subset(schedule[i]);
        std::optional<classify::TrainedModel> model;
        const std::uint64_t seed = derive_seed(plan.seed, i);
        if (forest_spec) {
          auto config = *fixed_forest;
          if (forest_spec->tuning == TuningMode::EveryFraction) {
            config = classify::tune_random_forest(texts, labels, forest_spec->grid, forest_spec->forest,
                                                  forest_spec->vectorizer, derive_seed(seed, 0x70E))
                         .best;
          }
          model.emplace(classify::train_random_forest(texts, labels, config, forest_spec->vectorizer, seed));
        } else {
          const auto& nb = std::get<NaiveBayesSpec>(trainer);
          model.emplace(classify::train_naive_bayes(texts, labels, nb.alpha, nb.vectorizer));
        }
        result.model_metadata.push_back(model->metadata_json());
        predictions = model->predict(test_texts);
        for (std::size_t r = 0; r < predictions.rows.size(); ++r) {
          predictions.rows[r].pair_id = std::to_string(plan.test_set[r]);
          predictions.rows[r].true_label = test_labels[r];
        }
      }
    } catch (const Error& e) {
      throw Error(e.code(), "harness", "fraction " + csv::format_decimal(fraction) + ": " + e.what());
    }

    CurvePoint point;
    point.fraction = fraction;
    point.n_train = schedule[i].size();
    point.n_test = plan.test_set.size();
    point.cm = classify::evaluate(predictions);
    curve.points.push_back(point);
  }

  if (!missing.empty()) {
    result.warnings.push_back("no external predictions for fraction(s) " + fraction_list(missing));
  }
  if (const auto* external = std::get_if<ExternalSpec>(&trainer)) {
    std::vector<double> unused;
    for (const auto& [f, preds] : external->by_fraction) {
      if (std::none_of(fractions.begin(), fractions.end(), [&](double g) { return same_fraction(f, g); })) {
        unused.push_back(f);
      }
    }
    if (!unused.empty()) {
      result.warnings.push_back("external predictions for fraction(s) " + fraction_list(unused) +
                                " are not on the schedule and were ignored");
    }
  }
  if (curve.points.empty()) fail(ErrorCode::Curve, "no curve points could be produced");
  attach_economics(curve);
  return result;
}

LearningCurve reprice(const LearningCurve& curve, const roi::CostParameters& parameters) {
  LearningCurve out = curve;
  out.parameters = parameters;
  attach_economics(out);
  return out;
}

MaxRoi max_roi_point(const LearningCurve& curve) {
  require_points(curve, 1, "max-ROI search");
  const CurvePoint* best = &curve.points.front();
  for (const auto& p : curve.points) {
    if (p.econ.roi > best->econ.roi) best = &p;
  }
  return {best->fraction, best->econ.roi, best->f1};
}

std::optional<BreakEven> break_even(const LearningCurve& curve) {
  require_points(curve, 1, "break-even search");
  const auto& pts = curve.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].econ.roi < 0.0) continue;
    BreakEven be{pts[i].fraction, pts[i].fraction};
    if (i > 0) {
      const auto& lo = pts[i - 1];
      const auto& hi = pts[i];
      be.interpolated_fraction =
          lo.fraction + (hi.fraction - lo.fraction) * (0.0 - lo.econ.roi) / (hi.econ.roi - lo.econ.roi);
    }
    return be;
  }
  return std::nullopt;
}

std::vector<double> crossover(const LearningCurve& a, const LearningCurve& b, Metric metric) {
  if (a.points.size() != b.points.size()) {
    fail(ErrorCode::Comparability, "curves '" + a.technique_label + "' and '" + b.technique_label +
                                       "' have different fraction grids");
  }
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (!same_fraction(a.points[i].fraction, b.points[i].fraction)) {
      fail(ErrorCode::Comparability, "curves '" + a.technique_label + "' and '" + b.technique_label +
                                         "' have different fraction grids");
    }
  }
  std::vector<double> out;
  int last = 0;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const int s = sign(metric_value(a.points[i], metric) - metric_value(b.points[i], metric));
    if (s == 0) continue;
    if (last != 0 && s != last) out.push_back(a.points[i].fraction);
    last = s;
  }
  return out;
}

std::optional<double> diminishing_returns(const LearningCurve& curve, Metric metric, double epsilon) {
  if (!(epsilon > 0.0)) fail(ErrorCode::Parameter, "diminishing-returns epsilon must be > 0");
  require_points(curve, 2, "diminishing-returns search");
  const auto& pts = curve.points;
  // suffix_max[i] = max metric over points after i
  std::vector<double> suffix_max(pts.size(), -INFINITY);
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    suffix_max[i] = std::max(suffix_max[i + 1], metric_value(pts[i + 1], metric));
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (suffix_max[i] - metric_value(pts[i], metric) < epsilon) return pts[i].fraction;
  }
  return std::nullopt;
}

std::pair<LearningCurve, LearningCurve> intersect_grids(const LearningCurve& a, const LearningCurve& b,
                                                        std::vector<std::string>& warnings) {
  auto restrict = [&](const LearningCurve& self, const LearningCurve& other) {
    LearningCurve out = self;
    out.points.clear();
    std::vector<double> dropped;
    for (const auto& p : self.points) {
      const bool shared = std::any_of(other.points.begin(), other.points.end(),
                                      [&](const CurvePoint& q) { return same_fraction(p.fraction, q.fraction); });
      if (shared) {
        out.points.push_back(p);
      } else {
        dropped.push_back(p.fraction);
      }
    }
    if (!dropped.empty()) {
      warnings.push_back("comparing '" + self.technique_label + "' with '" + other.technique_label +
                         "' drops fraction(s) " + fraction_list(dropped));
    }
    return out;
  };
  auto ra = restrict(a, b);
  auto rb = restrict(b, a);
  // Use identical fraction values on both sides.
  for (std::size_t i = 0; i < rb.points.size(); ++i) rb.points[i].fraction = ra.points[i].fraction;
  return {std::move(ra), std::move(rb)};
}

DecisionSummary summarize(const LearningCurve& curve, const std::vector<const LearningCurve*>& rivals,
                          const DecisionOptions& options) {
  DecisionSummary s;
  s.technique_label = curve.technique_label;
  s.max_roi = max_roi_point(curve);
  s.break_even = break_even(curve);
  if (curve.points.size() >= 2) {
    s.diminishing_f1 = diminishing_returns(curve, Metric::F1, options.epsilon_f1);
    s.diminishing_roi = diminishing_returns(curve, Metric::Roi, options.epsilon_roi);
  }
  for (const auto* rival : rivals) {
    std::vector<std::string> ignored;
    auto [mine, theirs] = intersect_grids(curve, *rival, ignored);
    RivalCrossovers c;
    c.rival = rival->technique_label;
    c.f1 = crossover(mine, theirs, Metric::F1);
    c.roi = crossover(mine, theirs, Metric::Roi);
    s.crossovers.push_back(std::move(c));
  }
  return s;
}

std::vector<ScenarioResult> scenario_analysis(const LearningCurve& curve, const std::vector<Scenario>& scenarios,
                                              const DecisionOptions& options) {
  if (scenarios.empty()) fail(ErrorCode::Parameter, "scenario list is empty");
  std::vector<ScenarioResult> out;
  for (const auto& scenario : scenarios) {
    try {
      ScenarioResult r;
      r.name = scenario.name;
      r.parameters = scenario.parameters;
      r.curve = reprice(curve, scenario.parameters);
      r.summary = summarize(r.curve, {}, options);
      out.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error(e.code(), "harness", "scenario '" + scenario.name + "': " + e.what());
    }
  }
  return out;
}

std::vector<RepeatedPoint> run_repeated(const corpus::PairCorpus& corpus, double test_fraction,
                                        const std::vector<double>& fractions, const TrainerSpec& trainer,
                                        const roi::CostParameters& parameters,
                                        const std::vector<std::uint64_t>& seeds, CostMode cost_mode) {
  if (seeds.empty()) fail(ErrorCode::Parameter, "repeat mode needs at least one seed");
  if (std::holds_alternative<ExternalSpec>(trainer)) {
    fail(ErrorCode::Parameter, "repeat mode re-splits the corpus and cannot reuse external predictions");
  }
  std::vector<std::vector<double>> f1(fractions.size());
  std::vector<std::vector<double>> roi(fractions.size());
  for (auto seed : seeds) {
    const auto plan = corpus::split(corpus, test_fraction, seed);
    const auto result = run_curve(corpus, plan, fractions, trainer, parameters, "repeat", cost_mode);
    for (std::size_t i = 0; i < result.curve.points.size(); ++i) {
      f1[i].push_back(result.curve.points[i].f1);
      roi[i].push_back(result.curve.points[i].econ.roi);
    }
  }
  std::vector<RepeatedPoint> out;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    out.push_back({fractions[i], mean(f1[i]), sample_sd(f1[i]), mean(roi[i]), sample_sd(roi[i])});
  }
  return out;
}

LearningCurve read_curve_csv(std::string_view text, std::string technique_label,
                             const roi::CostParameters& parameters, CostMode mode) {
  auto rows = csv::parse(text, "harness");
  const std::vector<std::string> header = {"fraction", "n_train", "n_test", "tp", "fp", "fn", "tn",
                                           "precision", "recall", "f1", "cost_usd", "penalty_usd",
                                           "benefit_usd", "roi"};
  if (rows.empty() || rows.front().fields != header) {
    fail(ErrorCode::Schema, "curve CSV header must be " + [&] {
      std::string h;
      for (const auto& c : header) h += (h.empty() ? "" : ",") + c;
      return h;
    }());
  }
  LearningCurve curve;
  curve.technique_label = std::move(technique_label);
  curve.parameters = parameters;
  curve.cost_mode = mode;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::string where = " at line " + std::to_string(rows[r].line);
    if (f.size() != header.size()) fail(ErrorCode::Schema, "wrong field count" + where);
    auto count = [&](std::size_t i) -> std::uint64_t {
      const auto& s = f[i];
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        fail(ErrorCode::Schema, header[i] + " must be a nonnegative integer" + where);
      }
      return std::stoull(s);
    };
    CurvePoint p;
    try {
      std::size_t used = 0;
      p.fraction = std::stod(f[0], &used);
      if (used != f[0].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail(ErrorCode::Schema, "fraction is not a number" + where);
    }
    p.n_train = count(1);
    p.n_test = count(2);
    p.cm = {count(3), count(4), count(5), count(6)};
    if (p.cm.total() != p.n_test) fail(ErrorCode::Curve, "tp+fp+fn+tn differs from n_test" + where);
    if (!curve.points.empty()) {
      if (!(p.fraction > curve.points.back().fraction)) fail(ErrorCode::Curve, "fractions must increase" + where);
      if (p.n_test != curve.points.back().n_test) fail(ErrorCode::Curve, "points must share one test set" + where);
    }
    curve.points.push_back(p);
  }
  if (curve.points.empty()) fail(ErrorCode::Curve, "curve CSV has no points");
  attach_economics(curve);
  return curve;
}

std::string to_json(const DecisionSummary& s) {
  nlohmann::ordered_json j;
  j["technique"] = s.technique_label;
  j["max_roi"] = {{"fraction", s.max_roi.fraction}, {"roi", s.max_roi.roi}, {"f1", s.max_roi.f1}};
  if (s.break_even) {
    j["break_even"] = {{"grid_fraction", s.break_even->grid_fraction},
                       {"interpolated_fraction", s.break_even->interpolated_fraction}};
  } else {
    j["break_even"] = nullptr;
  }
  j["diminishing_returns"] = {
      {"f1", s.diminishing_f1 ? nlohmann::ordered_json(*s.diminishing_f1) : nlohmann::ordered_json()},
      {"roi", s.diminishing_roi ? nlohmann::ordered_json(*s.diminishing_roi) : nlohmann::ordered_json()}};
  auto crossings = nlohmann::ordered_json::array();
  for (const auto& c : s.crossovers) {
    crossings.push_back({{"rival", c.rival}, {"f1", c.f1}, {"roi", c.roi}});
  }
  j["crossovers"] = crossings;
  return j.dump(2);
}

std::string curve_metadata_json(const LearningCurve& curve) {
  nlohmann::ordered_json j;
  j["technique"] = curve.technique_label;
  j["seed"] = curve.seed;
  j["cost_mode"] = std::string(to_string(curve.cost_mode));
  j["parameters"] = nlohmann::ordered_json::parse(roi::to_json(curve.parameters));
  std::vector<double> fractions;
  for (const auto& p : curve.points) fractions.push_back(p.fraction);
  j["fractions"] = fractions;
  return j.dump(2);
}

}  // namespace roiml::harness
