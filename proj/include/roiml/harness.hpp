#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "roiml/classify.hpp"
#include "roiml/confusion_matrix.hpp"
#include "roiml/corpus.hpp"
#include "roiml/roi.hpp"

namespace roiml::harness {

/// How many samples each point is charged for.
enum class CostMode {
  PerIteration,  // n_train + n_test of the point itself
  Cumulative,    // running total of (n_train + n_test) over all points so far
};

std::string_view to_string(CostMode mode);
CostMode cost_mode_from_string(std::string_view name);

struct CurvePoint {
  double fraction = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  ConfusionMatrix cm;
  double f1 = 0.0;
  roi::EconomicOutcome econ;
};

struct LearningCurve {
  std::string technique_label;
  std::vector<CurvePoint> points;  // strictly increasing fraction, one shared test set
  std::uint64_t seed = 0;
  roi::CostParameters parameters;
  CostMode cost_mode = CostMode::PerIteration;
};

enum class TuningMode { None, Once, EveryFraction };
std::string_view to_string(TuningMode mode);
TuningMode tuning_mode_from_string(std::string_view name);

struct ForestSpec {
  classify::ForestConfig forest;
  classify::VectorizerConfig vectorizer;
  TuningMode tuning = TuningMode::Once;  // Once tunes on the largest fraction
  classify::TuningGrid grid;
};

struct NaiveBayesSpec {
  double alpha = 1.0;
  classify::VectorizerConfig vectorizer;
};

/// Predictions produced elsewhere, keyed by training fraction.
struct ExternalSpec {
  std::vector<std::pair<double, classify::PredictionSet>> by_fraction;
};

using TrainerSpec = std::variant<ForestSpec, NaiveBayesSpec, ExternalSpec>;

struct CurveResult {
  LearningCurve curve;
  std::vector<std::string> warnings;
  std::optional<classify::ForestConfig> tuned;  // set when a single tuning pass ran
  std::vector<std::string> model_metadata;      // one JSON document per trained point
};

/// Trains on each schedule subset, predicts the fixed test set and attaches
/// economics. Points are produced in fraction order.
CurveResult run_curve(const corpus::PairCorpus& corpus, const corpus::SplitPlan& plan,
                      const std::vector<double>& fractions, const TrainerSpec& trainer,
                      const roi::CostParameters& parameters, std::string technique_label,
                      CostMode cost_mode = CostMode::PerIteration);

/// Samples charged at each point under `mode`.
std::vector<std::int64_t> processed_counts(const std::vector<CurvePoint>& points, CostMode mode);

/// Recomputes f1 and economics from the stored confusion matrices.
LearningCurve reprice(const LearningCurve& curve, const roi::CostParameters& parameters);

// Decisions --------------------------------------------------------------------

enum class Metric { F1, Roi };
std::string_view to_string(Metric metric);

struct MaxRoi {
  double fraction = 0.0;
  double roi = 0.0;
  double f1 = 0.0;
};

/// Largest ROI; ties go to the smallest fraction.
MaxRoi max_roi_point(const LearningCurve& curve);

struct BreakEven {
  double grid_fraction = 0.0;          // first grid point with roi >= 0
  double interpolated_fraction = 0.0;  // linear crossing of zero between bracketing points
};

std::optional<BreakEven> break_even(const LearningCurve& curve);

/// Grid fractions where the sign of (a - b) changes relative to the last
/// nonzero sign. Grids must match.
std::vector<double> crossover(const LearningCurve& a, const LearningCurve& b, Metric metric);

/// Smallest fraction after which no later point gains epsilon or more.
std::optional<double> diminishing_returns(const LearningCurve& curve, Metric metric, double epsilon);

/// Restricts both curves to their common fractions; notes dropped points.
std::pair<LearningCurve, LearningCurve> intersect_grids(const LearningCurve& a, const LearningCurve& b,
                                                        std::vector<std::string>& warnings);

struct RivalCrossovers {
  std::string rival;
  std::vector<double> f1;
  std::vector<double> roi;
};

struct DecisionOptions {
  double epsilon_f1 = 0.01;
  double epsilon_roi = 1.0;
};

struct DecisionSummary {
  std::string technique_label;
  MaxRoi max_roi;
  std::optional<BreakEven> break_even;
  std::optional<double> diminishing_f1;
  std::optional<double> diminishing_roi;
  std::vector<RivalCrossovers> crossovers;
};

DecisionSummary summarize(const LearningCurve& curve, const std::vector<const LearningCurve*>& rivals = {},
                          const DecisionOptions& options = {});

struct Scenario {
  std::string name;
  roi::CostParameters parameters;
};

struct ScenarioResult {
  std::string name;
  roi::CostParameters parameters;
  LearningCurve curve;
  DecisionSummary summary;
};

/// Re-derives economics and decisions per scenario; the input curve is untouched.
std::vector<ScenarioResult> scenario_analysis(const LearningCurve& curve, const std::vector<Scenario>& scenarios,
                                              const DecisionOptions& options = {});

// Repeated runs ------------------------------------------------------------------

struct RepeatedPoint {
  double fraction = 0.0;
  double f1_mean = 0.0;
  double f1_sd = 0.0;
  double roi_mean = 0.0;
  double roi_sd = 0.0;
};

/// Re-splits and re-trains once per seed; reports mean and sample standard
/// deviation per fraction.
std::vector<RepeatedPoint> run_repeated(const corpus::PairCorpus& corpus, double test_fraction,
                                        const std::vector<double>& fractions, const TrainerSpec& trainer,
                                        const roi::CostParameters& parameters,
                                        const std::vector<std::uint64_t>& seeds, CostMode cost_mode);

// Serialisation ------------------------------------------------------------------

/// Parses the curve CSV (see report::emit_curve_csv) back into points and
/// reprices them with `parameters` and `mode`.
LearningCurve read_curve_csv(std::string_view text, std::string technique_label,
                             const roi::CostParameters& parameters, CostMode mode = CostMode::PerIteration);

/// Full-precision decision summary.
std::string to_json(const DecisionSummary& summary);

/// Label, seed, cost mode, parameters and fractions of a curve.
std::string curve_metadata_json(const LearningCurve& curve);

}  // namespace roiml::harness
