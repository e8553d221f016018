#include "roiml.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "roiml/classify.hpp"
#include "roiml/error.hpp"
#include "roiml/harness.hpp"
#include "roiml/pipeline.hpp"
#include "roiml/report.hpp"
#include "roiml/roi.hpp"

#ifndef ROIML_VERSION
#define ROIML_VERSION "0.0.0"
#endif

struct roiml_params {
  roiml::roi::CostParameters value;
};

struct roiml_predictions {
  roiml::classify::PredictionSet value;
};

struct roiml_curve {
  roiml::harness::LearningCurve value;
};

struct roiml_run_result {
  roiml::pipeline::Outcome value;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_module;

roiml_status fail(roiml_status status, const char* module, const std::string& message) {
  last_error = message;
  last_module = module;
  return status;
}

// Runs `body`, mapping exceptions onto status codes.
template <typename F>
roiml_status guarded(F&& body) {
  try {
    last_error.clear();
    last_module.clear();
    body();
    return ROIML_OK;
  } catch (const roiml::Error& e) {
    last_error = e.message();
    last_module = e.module();
    return static_cast<roiml_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    return fail(ROIML_E_INTERNAL, "capi", "out of memory");
  } catch (const std::exception& e) {
    return fail(ROIML_E_INTERNAL, "capi", e.what());
  } catch (...) {
    return fail(ROIML_E_INTERNAL, "capi", "unknown failure");
  }
}

#define ROIML_REQUIRE(ptr) \
  if (!(ptr)) return fail(ROIML_E_NULL_ARGUMENT, "capi", #ptr " is NULL")

char* duplicate(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

roiml::ConfusionMatrix from_c(const roiml_confusion& cm) { return {cm.tp, cm.fp, cm.fn, cm.tn}; }

roiml_confusion to_c(const roiml::ConfusionMatrix& cm) { return {cm.tp, cm.fp, cm.fn, cm.tn}; }

roiml_outcome to_c(const roiml::roi::EconomicOutcome& o) {
  return {o.n_processed, o.cost_usd, o.penalty_usd, o.benefit_usd, o.roi};
}

roiml_log_fn log_callback = nullptr;
void* log_user_data = nullptr;

}  // namespace

extern "C" {

const char* roiml_version(void) { return ROIML_VERSION; }

const char* roiml_status_name(roiml_status status) {
  switch (status) {
    case ROIML_OK: return "ok";
    case ROIML_E_NULL_ARGUMENT: return "null_argument";
    case ROIML_E_OUT_OF_RANGE: return "out_of_range";
    case ROIML_E_INTERNAL: return "internal_error";
    default: break;
  }
  const int code = static_cast<int>(status);
  if (code >= 1 && code <= 18) return roiml::to_string(static_cast<roiml::ErrorCode>(code)).data();
  return "unknown_status";
}

const char* roiml_last_error(void) { return last_error.c_str(); }
const char* roiml_last_error_module(void) { return last_module.c_str(); }

void roiml_string_free(char* text) { std::free(text); }

void roiml_set_log_callback(roiml_log_fn callback, void* user_data, roiml_log_level max_level) {
  using roiml::pipeline::LogLevel;
  log_callback = callback;
  log_user_data = user_data;
  if (!callback) {
    roiml::pipeline::set_log_sink(nullptr, LogLevel::Error);
    return;
  }
  roiml::pipeline::set_log_sink(
      [](LogLevel level, const std::string& message) {
        if (log_callback) log_callback(static_cast<roiml_log_level>(level), message.c_str(), log_user_data);
      },
      static_cast<LogLevel>(max_level));
}

roiml_status roiml_params_preset(const char* name, roiml_params** out) {
  ROIML_REQUIRE(name);
  ROIML_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new roiml_params{roiml::roi::preset(name)}; });
}

roiml_status roiml_params_from_json(const char* json, const roiml_params* base, roiml_params** out) {
  ROIML_REQUIRE(json);
  ROIML_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto p = roiml::roi::from_json(json, base ? base->value : roiml::roi::CostParameters{});
    roiml::roi::validate(p);
    *out = new roiml_params{p};
  });
}

roiml_status roiml_params_to_json(const roiml_params* params, char** out) {
  ROIML_REQUIRE(params);
  ROIML_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = duplicate(roiml::roi::to_json(params->value)); });
}

void roiml_params_free(roiml_params* params) { delete params; }

roiml_status roiml_f1(const roiml_confusion* cm, double* out) {
  ROIML_REQUIRE(cm);
  ROIML_REQUIRE(out);
  return guarded([&] { *out = roiml::roi::f1_score(from_c(*cm)); });
}

roiml_status roiml_processing_cost(const roiml_params* params, int64_t n, double* out) {
  ROIML_REQUIRE(params);
  ROIML_REQUIRE(out);
  return guarded([&] { *out = roiml::roi::processing_cost(n, params->value); });
}

roiml_status roiml_economic_outcome(const roiml_params* params, int64_t n, const roiml_confusion* cm,
                                    roiml_outcome* out) {
  ROIML_REQUIRE(params);
  ROIML_REQUIRE(cm);
  ROIML_REQUIRE(out);
  return guarded([&] { *out = to_c(roiml::roi::economic_outcome(n, from_c(*cm), params->value)); });
}

roiml_status roiml_predictions_load(const char* csv_text, roiml_predictions** out) {
  ROIML_REQUIRE(csv_text);
  ROIML_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    *out = new roiml_predictions{roiml::classify::load_external_predictions(csv_text).predictions};
  });
}

size_t roiml_predictions_size(const roiml_predictions* predictions) {
  return predictions ? predictions->value.size() : 0;
}

roiml_status roiml_predictions_evaluate(const roiml_predictions* predictions, roiml_confusion* out) {
  ROIML_REQUIRE(predictions);
  ROIML_REQUIRE(out);
  return guarded([&] { *out = to_c(roiml::classify::evaluate(predictions->value)); });
}

void roiml_predictions_free(roiml_predictions* predictions) { delete predictions; }

roiml_status roiml_curve_read_csv(const char* csv_text, const char* label, const roiml_params* params,
                                  roiml_cost_mode mode, roiml_curve** out) {
  ROIML_REQUIRE(csv_text);
  ROIML_REQUIRE(params);
  ROIML_REQUIRE(out);
  *out = nullptr;
  if (mode != ROIML_COST_PER_ITERATION && mode != ROIML_COST_CUMULATIVE) {
    return fail(ROIML_E_PARAMETER, "capi", "unknown cost mode");
  }
  return guarded([&] {
    const auto m = mode == ROIML_COST_CUMULATIVE ? roiml::harness::CostMode::Cumulative
                                                 : roiml::harness::CostMode::PerIteration;
    *out = new roiml_curve{roiml::harness::read_curve_csv(csv_text, label ? label : "", params->value, m)};
  });
}

size_t roiml_curve_size(const roiml_curve* curve) { return curve ? curve->value.points.size() : 0; }

roiml_status roiml_curve_point(const roiml_curve* curve, size_t index, roiml_point* out) {
  ROIML_REQUIRE(curve);
  ROIML_REQUIRE(out);
  if (index >= curve->value.points.size()) {
    return fail(ROIML_E_OUT_OF_RANGE, "capi", "point index " + std::to_string(index) + " is out of range");
  }
  const auto& p = curve->value.points[index];
  *out = {p.fraction, p.n_train, p.n_test, to_c(p.cm), p.f1, to_c(p.econ)};
  last_error.clear();
  last_module.clear();
  return ROIML_OK;
}

roiml_status roiml_curve_max_roi(const roiml_curve* curve, double* fraction, double* roi) {
  ROIML_REQUIRE(curve);
  ROIML_REQUIRE(fraction);
  ROIML_REQUIRE(roi);
  return guarded([&] {
    const auto m = roiml::harness::max_roi_point(curve->value);
    *fraction = m.fraction;
    *roi = m.roi;
  });
}

roiml_status roiml_curve_break_even(const roiml_curve* curve, int* found, double* grid_fraction,
                                    double* interpolated_fraction) {
  ROIML_REQUIRE(curve);
  ROIML_REQUIRE(found);
  return guarded([&] {
    const auto be = roiml::harness::break_even(curve->value);
    *found = be ? 1 : 0;
    if (be && grid_fraction) *grid_fraction = be->grid_fraction;
    if (be && interpolated_fraction) *interpolated_fraction = be->interpolated_fraction;
  });
}

roiml_status roiml_curve_crossover(const roiml_curve* a, const roiml_curve* b, roiml_metric metric,
                                   double* fractions, size_t capacity, size_t* count) {
  ROIML_REQUIRE(a);
  ROIML_REQUIRE(b);
  ROIML_REQUIRE(count);
  if (capacity > 0 && !fractions) return fail(ROIML_E_NULL_ARGUMENT, "capi", "fractions is NULL");
  return guarded([&] {
    const auto m = metric == ROIML_METRIC_ROI ? roiml::harness::Metric::Roi : roiml::harness::Metric::F1;
    const auto xs = roiml::harness::crossover(a->value, b->value, m);
    *count = xs.size();
    for (size_t i = 0; i < xs.size() && i < capacity; ++i) fractions[i] = xs[i];
  });
}

roiml_status roiml_curve_to_csv(const roiml_curve* curve, char** out) {
  ROIML_REQUIRE(curve);
  ROIML_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = duplicate(roiml::report::emit_curve_csv(curve->value)); });
}

void roiml_curve_free(roiml_curve* curve) { delete curve; }

roiml_status roiml_run(const roiml_run_request* request, roiml_run_result** out) {
  ROIML_REQUIRE(request);
  ROIML_REQUIRE(out);
  *out = nullptr;
  ROIML_REQUIRE(request->subcommand);
  ROIML_REQUIRE(request->config_path);
  return guarded([&] {
    roiml::pipeline::Request r;
    r.subcommand = request->subcommand;
    r.config_path = request->config_path;
    if (request->output_dir) r.output = request->output_dir;
    if (request->has_seed) r.seed = request->seed;
    if (request->fractions) r.fractions = request->fractions;
    if (request->external_predictions) r.external_predictions = request->external_predictions;
    *out = new roiml_run_result{roiml::pipeline::run(r)};
  });
}

const char* roiml_run_stdout(const roiml_run_result* result) {
  return result ? result->value.stdout_text.c_str() : "";
}

size_t roiml_run_warning_count(const roiml_run_result* result) {
  return result ? result->value.warnings.size() : 0;
}

const char* roiml_run_warning(const roiml_run_result* result, size_t index) {
  if (!result || index >= result->value.warnings.size()) return nullptr;
  return result->value.warnings[index].c_str();
}

size_t roiml_run_artifact_count(const roiml_run_result* result) {
  return result ? result->value.artifacts.size() : 0;
}

const char* roiml_run_artifact(const roiml_run_result* result, size_t index) {
  if (!result || index >= result->value.artifacts.size()) return nullptr;
  return result->value.artifacts[index].c_str();
}

void roiml_run_result_free(roiml_run_result* result) { delete result; }

}  // extern "C"
