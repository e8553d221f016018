#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "roiml/confusion_matrix.hpp"

namespace roiml::roi {

/// Economic inputs. Per-sample factors are minutes; penalties and product
/// value are currency units; c_hr is currency per person-hour. Defaults are
/// the industry estimates used for the Firefox and Typo3 studies.
struct CostParameters {
  // Phase A
  double c_pl = 0.0;
  // Phase B: data gathering, pre-processing, labelling (0.5 min each)
  double c_dg = 0.5;
  double c_pp = 0.5;
  double c_l = 0.5;
  // Phase C: tuning, training and testing
  double c_t = 0.0;
  double c_train_test = 0.3;
  // Phase D
  double c_e = 0.0;

  double cost_fp = 10'000.0;
  double cost_fn = 25'000.0;
  int n_hr = 10;
  double c_hr = 70.0;
  double value_prod = 4'000'000.0;

  double phase_b_minutes() const { return c_dg + c_pp + c_l; }
  double phase_c_minutes() const { return c_t + c_train_test; }
  /// Sum of every per-sample factor, in minutes.
  double minutes_per_sample() const { return c_pl + phase_b_minutes() + phase_c_minutes() + c_e; }

  friend bool operator==(const CostParameters&, const CostParameters&) = default;
};

/// Throws Error(Parameter) on a negative or non-finite field, n_hr < 1 or c_hr <= 0.
void validate(const CostParameters& p);

/// Advisory notes (never errors): Phase B share outside 0.80 +/- 0.05.
std::vector<std::string> advisories(const CostParameters& p);

struct EconomicOutcome {
  std::int64_t n_processed = 0;
  double cost_usd = 0.0;
  double penalty_usd = 0.0;
  double benefit_usd = 0.0;
  double roi = 0.0;

  friend bool operator==(const EconomicOutcome&, const EconomicOutcome&) = default;
};

/// 2tp / (2tp + fp + fn), or 0 when no positives were predicted or present.
double f1_score(const ConfusionMatrix& cm);
double precision(const ConfusionMatrix& cm);
double recall(const ConfusionMatrix& cm);

/// n * minutes_per_sample / 60 * n_hr * c_hr.
double processing_cost(std::int64_t n, const CostParameters& p);

/// fp * cost_fp + fn * cost_fn
double total_penalty(const ConfusionMatrix& cm, const CostParameters& p);

/// value_prod - total_penalty; may be negative.
double benefit(const ConfusionMatrix& cm, const CostParameters& p);

/// (benefit - cost) / cost. Throws UndefinedRoi when cost <= 0.
double roi(double benefit_usd, double cost_usd);

EconomicOutcome economic_outcome(std::int64_t n, const ConfusionMatrix& cm, const CostParameters& p);

// Named presets ---------------------------------------------------------------

/// "table5-default" (industry estimates) or "desk-scale" (value_prod 50,000).
CostParameters preset(std::string_view name);
std::vector<std::string> preset_names();

/// snake_case JSON object mirroring the field names.
std::string to_json(const CostParameters& p);
/// Starts from `base` and overrides the keys present. Unknown keys are errors.
CostParameters from_json(std::string_view json_text, const CostParameters& base = {});

}  // namespace roiml::roi
