#include "roiml/roi.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "roiml/error.hpp"

namespace roiml::roi {
namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(code, "roi", message);
}

struct Field {
  const char* name;
  double CostParameters::*member;
};

constexpr Field kFields[] = {
    {"c_pl", &CostParameters::c_pl},
    {"c_dg", &CostParameters::c_dg},
    {"c_pp", &CostParameters::c_pp},
    {"c_l", &CostParameters::c_l},
    {"c_t", &CostParameters::c_t},
    {"c_train_test", &CostParameters::c_train_test},
    {"c_e", &CostParameters::c_e},
    {"cost_fp", &CostParameters::cost_fp},
    {"cost_fn", &CostParameters::cost_fn},
    {"c_hr", &CostParameters::c_hr},
    {"value_prod", &CostParameters::value_prod},
};

}  // namespace

void validate(const CostParameters& p) {
  for (const auto& f : kFields) {
    const double v = p.*f.member;
    if (!std::isfinite(v) || v < 0.0) {
      fail(ErrorCode::Parameter, std::string(f.name) + " must be a finite value >= 0");
    }
  }
  if (p.n_hr < 1) fail(ErrorCode::Parameter, "n_hr must be >= 1");
  if (!(p.c_hr > 0.0)) fail(ErrorCode::Parameter, "c_hr must be > 0");
}

std::vector<std::string> advisories(const CostParameters& p) {
  std::vector<std::string> notes;
  const double b = p.phase_b_minutes();
  const double c = p.phase_c_minutes();
  if (b + c <= 0.0) {
    notes.emplace_back("phase B and phase C per-sample factors are both zero");
    return notes;
  }
  const double share = b / (b + c);
  if (std::fabs(share - 0.80) > 0.05) {
    notes.push_back("phase B share of processing effort is " + std::to_string(share) +
                    ", outside the expected 0.80 +/- 0.05");
  }
  return notes;
}

double f1_score(const ConfusionMatrix& cm) {
  const std::uint64_t denom = 2 * cm.tp + cm.fp + cm.fn;
  if (denom == 0) return 0.0;
  return static_cast<double>(2 * cm.tp) / static_cast<double>(denom);
}

double precision(const ConfusionMatrix& cm) {
  const std::uint64_t denom = cm.tp + cm.fp;
  return denom == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(denom);
}

double recall(const ConfusionMatrix& cm) {
  const std::uint64_t denom = cm.tp + cm.fn;
  return denom == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(denom);
}

double processing_cost(std::int64_t n, const CostParameters& p) {
  if (n < 0) fail(ErrorCode::Parameter, "sample count must be >= 0");
  validate(p);
  return static_cast<double>(n) * p.minutes_per_sample() * p.n_hr * p.c_hr / 60.0;
}

double total_penalty(const ConfusionMatrix& cm, const CostParameters& p) {
  return static_cast<double>(cm.fp) * p.cost_fp + static_cast<double>(cm.fn) * p.cost_fn;
}

double benefit(const ConfusionMatrix& cm, const CostParameters& p) {
  return p.value_prod - total_penalty(cm, p);
}

double roi(double benefit_usd, double cost_usd) {
  if (!(cost_usd > 0.0)) fail(ErrorCode::UndefinedRoi, "ROI is undefined for cost <= 0");
  return (benefit_usd - cost_usd) / cost_usd;
}

EconomicOutcome economic_outcome(std::int64_t n, const ConfusionMatrix& cm, const CostParameters& p) {
  EconomicOutcome out;
  out.n_processed = n;
  out.cost_usd = processing_cost(n, p);
  out.penalty_usd = total_penalty(cm, p);
  out.benefit_usd = p.value_prod - out.penalty_usd;
  out.roi = roi(out.benefit_usd, out.cost_usd);
  return out;
}

CostParameters preset(std::string_view name) {
  if (name == "table5-default") return CostParameters{};
  if (name == "desk-scale") {
    CostParameters p;
    p.value_prod = 50'000.0;
    return p;
  }
  fail(ErrorCode::Parameter, "unknown economics profile '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() { return {"table5-default", "desk-scale"}; }

std::string to_json(const CostParameters& p) {
  nlohmann::ordered_json j;
  for (const auto& f : kFields) {
    if (std::string_view(f.name) == "c_hr") j["n_hr"] = p.n_hr;
    j[f.name] = p.*f.member;
  }
  return j.dump(2);
}

CostParameters from_json(std::string_view json_text, const CostParameters& base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::Parse, std::string("cost parameters: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::Parameter, "cost parameters must be a JSON object");
  CostParameters p = base;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& key = it.key();
    const auto& value = it.value();
    if (!value.is_number()) fail(ErrorCode::Parameter, key + " must be a number");
    if (key == "n_hr") {
      const double v = value.get<double>();
      if (v != std::floor(v) || std::fabs(v) > 1e9) fail(ErrorCode::Parameter, "n_hr must be an integer");
      p.n_hr = static_cast<int>(v);
      continue;
    }
    bool known = false;
    for (const auto& f : kFields) {
      if (key == f.name) {
        p.*f.member = value.get<double>();
        known = true;
      }
    }
    if (!known) fail(ErrorCode::Parameter, "unknown cost parameter '" + key + "'");
  }
  validate(p);
  return p;
}

}  // namespace roiml::roi
