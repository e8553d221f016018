#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "roiml/harness.hpp"

namespace roiml::report {

/// fraction,n_train,n_test,tp,fp,fn,tn,precision,recall,f1,cost_usd,penalty_usd,benefit_usd,roi
/// LF line ends, reals at six decimals.
std::string emit_curve_csv(const harness::LearningCurve& curve);

struct Axis {
  std::string label;
  std::string unit;
};

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // x ascending
  bool secondary_axis = false;
};

struct ChartSpec {
  std::string title;
  Axis x;
  Axis y;
  std::optional<Axis> y2;  // bi-criterion charts (e.g. F1 and ROI over fraction)
  std::vector<Series> series;
};

/// SVG 1.1, 800x500, one polyline and markers per series plus a legend.
/// Byte-identical for identical input.
std::string render_chart(const ChartSpec& spec);

/// Metric over fraction for several techniques.
ChartSpec overlay_chart(const std::vector<const harness::LearningCurve*>& curves, harness::Metric metric,
                        const std::string& title);

/// F1 (left axis) and ROI (right axis) over fraction for one technique.
ChartSpec f1_roi_chart(const harness::LearningCurve& curve);

struct TechniqueReport {
  const harness::LearningCurve* curve = nullptr;
  harness::DecisionSummary decisions;
  std::vector<harness::ScenarioResult> scenarios;
};

struct Artifact {
  std::string label;
  std::string path;
};

/// CommonMark summary: comparison table ranked by max ROI, one section per
/// technique, a scenario table when scenarios exist, and artifact links.
std::string emit_summary(const std::vector<TechniqueReport>& techniques, const std::vector<Artifact>& artifacts,
                         const std::string& title = "ROI report");

}  // namespace roiml::report
