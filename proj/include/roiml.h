/* C interface to the roiml library. All functions are thread-safe unless a
 * handle is shared between threads; error details are kept per thread. */
#ifndef ROIML_H
#define ROIML_H

#include <stddef.h>
#include <stdint.h>

#if defined(ROIML_BUILDING_LIBRARY)
#define ROIML_API __attribute__((visibility("default")))
#else
#define ROIML_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum roiml_status {
  ROIML_OK = 0,
  ROIML_E_PARSE = 1,
  ROIML_E_SCHEMA = 2,
  ROIML_E_CORPUS = 3,
  ROIML_E_CAPACITY = 4,
  ROIML_E_IMBALANCE = 5,
  ROIML_E_SIZE = 6,
  ROIML_E_RANGE = 7,
  ROIML_E_FIT = 8,
  ROIML_E_DEGENERATE_DATA = 9,
  ROIML_E_PARAMETER = 10,
  ROIML_E_EVALUATION = 11,
  ROIML_E_UNDEFINED_ROI = 12,
  ROIML_E_COMPARABILITY = 13,
  ROIML_E_CHART = 14,
  ROIML_E_CONFIG = 15,
  ROIML_E_IO = 16,
  ROIML_E_CURVE = 17,
  ROIML_E_USAGE = 18,
  ROIML_E_NULL_ARGUMENT = 100,
  ROIML_E_OUT_OF_RANGE = 101,
  ROIML_E_INTERNAL = 102
} roiml_status;

/* Opaque handles. Each has a matching *_free that accepts NULL. */
typedef struct roiml_params roiml_params;
typedef struct roiml_predictions roiml_predictions;
typedef struct roiml_curve roiml_curve;
typedef struct roiml_run_result roiml_run_result;

typedef struct roiml_confusion {
  uint64_t tp;
  uint64_t fp;
  uint64_t fn;
  uint64_t tn;
} roiml_confusion;

typedef struct roiml_outcome {
  int64_t n_processed;
  double cost_usd;
  double penalty_usd;
  double benefit_usd;
  double roi;
} roiml_outcome;

typedef struct roiml_point {
  double fraction;
  uint64_t n_train;
  uint64_t n_test;
  roiml_confusion cm;
  double f1;
  roiml_outcome econ;
} roiml_point;

typedef enum roiml_metric { ROIML_METRIC_F1 = 0, ROIML_METRIC_ROI = 1 } roiml_metric;
typedef enum roiml_cost_mode { ROIML_COST_PER_ITERATION = 0, ROIML_COST_CUMULATIVE = 1 } roiml_cost_mode;
typedef enum roiml_log_level {
  ROIML_LOG_ERROR = 0,
  ROIML_LOG_WARN = 1,
  ROIML_LOG_INFO = 2,
  ROIML_LOG_DEBUG = 3
} roiml_log_level;

ROIML_API const char* roiml_version(void);
ROIML_API const char* roiml_status_name(roiml_status status);

/* Message and module of the last failure on this thread; "" after success. */
ROIML_API const char* roiml_last_error(void);
ROIML_API const char* roiml_last_error_module(void);

/* Strings returned through char** are owned by the caller. */
ROIML_API void roiml_string_free(char* text);

typedef void (*roiml_log_fn)(roiml_log_level level, const char* message, void* user_data);
/* Pass NULL to silence logging. */
ROIML_API void roiml_set_log_callback(roiml_log_fn callback, void* user_data, roiml_log_level max_level);

/* Cost parameters */
ROIML_API roiml_status roiml_params_preset(const char* name, roiml_params** out);
ROIML_API roiml_status roiml_params_from_json(const char* json, const roiml_params* base, roiml_params** out);
ROIML_API roiml_status roiml_params_to_json(const roiml_params* params, char** out);
ROIML_API void roiml_params_free(roiml_params* params);

/* Economics */
ROIML_API roiml_status roiml_f1(const roiml_confusion* cm, double* out);
ROIML_API roiml_status roiml_processing_cost(const roiml_params* params, int64_t n, double* out);
ROIML_API roiml_status roiml_economic_outcome(const roiml_params* params, int64_t n, const roiml_confusion* cm,
                                              roiml_outcome* out);

/* Interchange predictions: pair_id,true_label,predicted_label[,score] */
ROIML_API roiml_status roiml_predictions_load(const char* csv_text, roiml_predictions** out);
ROIML_API size_t roiml_predictions_size(const roiml_predictions* predictions);
ROIML_API roiml_status roiml_predictions_evaluate(const roiml_predictions* predictions, roiml_confusion* out);
ROIML_API void roiml_predictions_free(roiml_predictions* predictions);

/* Learning curves from the curve CSV, repriced with params. */
ROIML_API roiml_status roiml_curve_read_csv(const char* csv_text, const char* label, const roiml_params* params,
                                            roiml_cost_mode mode, roiml_curve** out);
ROIML_API size_t roiml_curve_size(const roiml_curve* curve);
ROIML_API roiml_status roiml_curve_point(const roiml_curve* curve, size_t index, roiml_point* out);
ROIML_API roiml_status roiml_curve_max_roi(const roiml_curve* curve, double* fraction, double* roi);
/* *found is 0 when ROI is negative everywhere. */
ROIML_API roiml_status roiml_curve_break_even(const roiml_curve* curve, int* found, double* grid_fraction,
                                              double* interpolated_fraction);
/* Writes up to capacity fractions; *count receives the total. */
ROIML_API roiml_status roiml_curve_crossover(const roiml_curve* a, const roiml_curve* b, roiml_metric metric,
                                             double* fractions, size_t capacity, size_t* count);
ROIML_API roiml_status roiml_curve_to_csv(const roiml_curve* curve, char** out);
ROIML_API void roiml_curve_free(roiml_curve* curve);

/* Pipeline */
typedef struct roiml_run_request {
  const char* subcommand;     /* ingest, pairs, curve, compare, scenario, report, validate-config */
  const char* config_path;
  const char* output_dir;     /* NULL keeps the config value */
  int has_seed;
  uint64_t seed;
  const char* fractions;      /* "0.1,0.2" or NULL */
  const char* external_predictions; /* glob or NULL */
} roiml_run_request;

/* *out is NULL on failure; see roiml_last_error. */
ROIML_API roiml_status roiml_run(const roiml_run_request* request, roiml_run_result** out);
ROIML_API const char* roiml_run_stdout(const roiml_run_result* result);
ROIML_API size_t roiml_run_warning_count(const roiml_run_result* result);
ROIML_API const char* roiml_run_warning(const roiml_run_result* result, size_t index);
ROIML_API size_t roiml_run_artifact_count(const roiml_run_result* result);
ROIML_API const char* roiml_run_artifact(const roiml_run_result* result, size_t index);
ROIML_API void roiml_run_result_free(roiml_run_result* result);

#ifdef __cplusplus
}
#endif

#endif /* ROIML_H */
