#include "roiml/error.hpp"

namespace roiml {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Parse: return "parse_error";
    case ErrorCode::Schema: return "schema_error";
    case ErrorCode::Corpus: return "corpus_error";
    case ErrorCode::Capacity: return "capacity_error";
    case ErrorCode::Imbalance: return "imbalance_error";
    case ErrorCode::Size: return "size_error";
    case ErrorCode::Range: return "range_error";
    case ErrorCode::Fit: return "fit_error";
    case ErrorCode::DegenerateData: return "degenerate_data_error";
    case ErrorCode::Parameter: return "parameter_error";
    case ErrorCode::Evaluation: return "evaluation_error";
    case ErrorCode::UndefinedRoi: return "undefined_roi_error";
    case ErrorCode::Comparability: return "comparability_error";
    case ErrorCode::Chart: return "chart_error";
    case ErrorCode::Config: return "config_error";
    case ErrorCode::Io: return "io_error";
    case ErrorCode::Curve: return "curve_error";
    case ErrorCode::Usage: return "usage_error";
  }
  return "error";
}

}  // namespace roiml
