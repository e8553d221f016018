#include "roiml/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "roiml/csv.hpp"
#include "roiml/error.hpp"

namespace roiml::report {
namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 80.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 420.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  return s == "-0.00" ? "0.00" : s;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", std::fabs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string axis_title(const Axis& axis) {
  return axis.unit.empty() ? axis.label : axis.label + " (" + axis.unit + ")";
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  double map(double v, double from, double to) const { return from + (v - lo) / (hi - lo) * (to - from); }
};

Range padded_range(double lo, double hi) {
  double span = hi - lo;
  if (span <= 0.0) span = std::fabs(lo) > 0.0 ? std::fabs(lo) : 1.0;
  return {lo - 0.05 * span, hi + 0.05 * span};
}

// Five to ten ticks on a 1/2/5 step inside the range.
std::vector<double> ticks(const Range& r) {
  const double raw = (r.hi - r.lo) / 5.0;
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  double step = magnitude;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * magnitude;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-9 * step; t += step) {
    out.push_back(std::fabs(t) < 1e-12 * step ? 0.0 : t);
  }
  return out;
}

}  // namespace

std::string emit_curve_csv(const harness::LearningCurve& curve) {
  std::string out = "fraction,n_train,n_test,tp,fp,fn,tn,precision,recall,f1,cost_usd,penalty_usd,benefit_usd,roi\n";
  for (const auto& p : curve.points) {
    out += csv::format_row({
        csv::format_decimal(p.fraction),
        std::to_string(p.n_train),
        std::to_string(p.n_test),
        std::to_string(p.cm.tp),
        std::to_string(p.cm.fp),
        std::to_string(p.cm.fn),
        std::to_string(p.cm.tn),
        csv::format_decimal(roi::precision(p.cm)),
        csv::format_decimal(roi::recall(p.cm)),
        csv::format_decimal(p.f1),
        csv::format_decimal(p.econ.cost_usd),
        csv::format_decimal(p.econ.penalty_usd),
        csv::format_decimal(p.econ.benefit_usd),
        csv::format_decimal(p.econ.roi),
    });
  }
  return out;
}

std::string render_chart(const ChartSpec& spec) {
  if (spec.series.empty()) throw Error(ErrorCode::Chart, "report", "chart '" + spec.title + "' has no series");
  const bool dual = spec.y2.has_value();
  const double right = dual ? kWidth - 80.0 : kWidth - 30.0;

  double xmin = INFINITY, xmax = -INFINITY;
  double ymin[2] = {INFINITY, INFINITY}, ymax[2] = {-INFINITY, -INFINITY};
  for (const auto& s : spec.series) {
    if (s.points.empty()) throw Error(ErrorCode::Chart, "report", "series '" + s.label + "' has no points");
    if (s.secondary_axis && !dual) {
      throw Error(ErrorCode::Chart, "report", "series '" + s.label + "' uses a second y-axis the chart lacks");
    }
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const auto [x, y] = s.points[i];
      if (!std::isfinite(x) || !std::isfinite(y)) {
        throw Error(ErrorCode::Chart, "report", "series '" + s.label + "' has a non-finite point");
      }
      if (i > 0 && x < s.points[i - 1].first) {
        throw Error(ErrorCode::Chart, "report", "series '" + s.label + "' x-values are not ascending");
      }
      const int axis = s.secondary_axis ? 1 : 0;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin[axis] = std::min(ymin[axis], y);
      ymax[axis] = std::max(ymax[axis], y);
    }
  }
  const Range xr = padded_range(xmin, xmax);
  Range yr[2] = {padded_range(ymin[0], ymax[0]), padded_range(ymin[1], ymax[1])};
  if (!std::isfinite(ymin[0])) yr[0] = yr[1];
  if (!std::isfinite(ymin[1])) yr[1] = yr[0];

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"500\" "
         "viewBox=\"0 0 800 500\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
  svg += "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" + xml_escape(spec.title) + "</text>\n";

  // Axes, grid and tick labels.
  svg += "<g stroke=\"#cccccc\" stroke-width=\"1\">\n";
  for (double t : ticks(xr)) {
    const auto x = num(xr.map(t, kLeft, right));
    svg += "<line x1=\"" + x + "\" y1=\"" + num(kTop) + "\" x2=\"" + x + "\" y2=\"" + num(kBottom) + "\"/>\n";
  }
  for (double t : ticks(yr[0])) {
    const auto y = num(yr[0].map(t, kBottom, kTop));
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + y + "\" x2=\"" + num(right) + "\" y2=\"" + y + "\"/>\n";
  }
  svg += "</g>\n";
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(right - kLeft) + "\" height=\"" +
         num(kBottom - kTop) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(xr)) {
    svg += "<text x=\"" + num(xr.map(t, kLeft, right)) + "\" y=\"" + num(kBottom + 16) +
           "\" text-anchor=\"middle\">" + tick_label(t) + "</text>\n";
  }
  for (double t : ticks(yr[0])) {
    svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(yr[0].map(t, kBottom, kTop) + 4) +
           "\" text-anchor=\"end\">" + tick_label(t) + "</text>\n";
  }
  if (dual) {
    for (double t : ticks(yr[1])) {
      svg += "<text x=\"" + num(right + 6) + "\" y=\"" + num(yr[1].map(t, kBottom, kTop) + 4) +
             "\" text-anchor=\"start\">" + tick_label(t) + "</text>\n";
    }
  }
  svg += "<text x=\"" + num((kLeft + right) / 2) + "\" y=\"" + num(kBottom + 36) + "\" text-anchor=\"middle\">" +
         xml_escape(axis_title(spec.x)) + "</text>\n";
  svg += "<text x=\"18\" y=\"" + num((kTop + kBottom) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         num((kTop + kBottom) / 2) + ")\">" + xml_escape(axis_title(spec.y)) + "</text>\n";
  if (dual) {
    const auto x = num(kWidth - 18);
    svg += "<text x=\"" + x + "\" y=\"" + num((kTop + kBottom) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(90 " +
           x + " " + num((kTop + kBottom) / 2) + ")\">" + xml_escape(axis_title(*spec.y2)) + "</text>\n";
  }

  // Series.
  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    const Range& y = yr[s.secondary_axis ? 1 : 0];
    std::string coords;
    for (const auto& [px, py] : s.points) {
      if (!coords.empty()) coords.push_back(' ');
      coords += num(xr.map(px, kLeft, right)) + "," + num(y.map(py, kBottom, kTop));
    }
    svg += "<g class=\"series\" data-label=\"" + xml_escape(s.label) + "\">\n";
    if (s.points.size() > 1) {
      svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\"" +
             (s.secondary_axis ? " stroke-dasharray=\"6 3\"" : "") + " points=\"" + coords + "\"/>\n";
    }
    for (const auto& [px, py] : s.points) {
      svg += "<circle cx=\"" + num(xr.map(px, kLeft, right)) + "\" cy=\"" + num(y.map(py, kBottom, kTop)) +
             "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    svg += "</g>\n";
  }

  // Legend along the bottom edge.
  svg += "<g class=\"legend\">\n";
  double lx = kLeft;
  const double ly = kHeight - 18;
  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    const std::string label = s.label + (s.secondary_axis && dual ? " (right axis)" : "");
    svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 20) + "\" y2=\"" + num(ly - 4) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(lx + 26) + "\" y=\"" + num(ly) + "\">" + xml_escape(label) + "</text>\n";
    lx += 40.0 + 7.0 * static_cast<double>(label.size());
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

ChartSpec overlay_chart(const std::vector<const harness::LearningCurve*>& curves, harness::Metric metric,
                        const std::string& title) {
  ChartSpec spec;
  spec.title = title;
  spec.x = {"Training set", "fraction of dataset"};
  spec.y = metric == harness::Metric::F1 ? Axis{"F1", ""} : Axis{"ROI", "ratio"};
  for (const auto* curve : curves) {
    Series s;
    s.label = curve->technique_label;
    for (const auto& p : curve->points) s.points.emplace_back(p.fraction, metric == harness::Metric::F1 ? p.f1 : p.econ.roi);
    spec.series.push_back(std::move(s));
  }
  return spec;
}

ChartSpec f1_roi_chart(const harness::LearningCurve& curve) {
  ChartSpec spec;
  spec.title = "F1 vs ROI: " + curve.technique_label;
  spec.x = {"Training set", "fraction of dataset"};
  spec.y = {"F1", ""};
  spec.y2 = Axis{"ROI", "ratio"};
  Series f1{"F1", {}, false};
  Series roi{"ROI", {}, true};
  for (const auto& p : curve.points) {
    f1.points.emplace_back(p.fraction, p.f1);
    roi.points.emplace_back(p.fraction, p.econ.roi);
  }
  spec.series = {std::move(f1), std::move(roi)};
  return spec;
}

std::string emit_summary(const std::vector<TechniqueReport>& techniques, const std::vector<Artifact>& artifacts,
                         const std::string& title) {
  using csv::format_decimal;
  const std::string none = "—";
  auto fractions = [&](const std::vector<double>& fs) {
    if (fs.empty()) return std::string("none");
    std::string out;
    for (double f : fs) out += (out.empty() ? "" : ", ") + format_decimal(f);
    return out;
  };
  auto optional_fraction = [&](const std::optional<double>& f) { return f ? format_decimal(*f) : std::string("none"); };

  std::vector<const TechniqueReport*> ranked;
  for (const auto& t : techniques) ranked.push_back(&t);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto* a, const auto* b) {
    return a->decisions.max_roi.roi > b->decisions.max_roi.roi;
  });

  std::string md = "# " + title + "\n\n";
  md += "## Comparison\n\n";
  md += "| Rank | Technique | Max ROI | Fraction at max ROI | F1 at max ROI | Break-even (grid) | "
        "Break-even (interpolated) | F1 crossovers | ROI crossovers |\n";
  md += "|---:|---|---:|---:|---:|---:|---:|---|---|\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& d = ranked[i]->decisions;
    std::string f1_cross = none;
    std::string roi_cross = none;
    if (!d.crossovers.empty()) {
      f1_cross.clear();
      roi_cross.clear();
      for (const auto& c : d.crossovers) {
        f1_cross += (f1_cross.empty() ? "" : "; ") + c.rival + ": " + fractions(c.f1);
        roi_cross += (roi_cross.empty() ? "" : "; ") + c.rival + ": " + fractions(c.roi);
      }
    }
    md += "| " + std::to_string(i + 1) + " | " + d.technique_label + " | " + format_decimal(d.max_roi.roi) + " | " +
          format_decimal(d.max_roi.fraction) + " | " + format_decimal(d.max_roi.f1) + " | " +
          (d.break_even ? format_decimal(d.break_even->grid_fraction) : std::string("none")) + " | " +
          (d.break_even ? format_decimal(d.break_even->interpolated_fraction) : std::string("none")) + " | " +
          f1_cross + " | " + roi_cross + " |\n";
  }

  for (const auto& t : techniques) {
    const auto& d = t.decisions;
    md += "\n## " + d.technique_label + "\n\n";
    md += "- Maximum ROI " + format_decimal(d.max_roi.roi) + " at fraction " + format_decimal(d.max_roi.fraction) +
          " (F1 " + format_decimal(d.max_roi.f1) + ")\n";
    md += "- Break-even: " +
          (d.break_even ? "fraction " + format_decimal(d.break_even->grid_fraction) + " on the grid, " +
                              format_decimal(d.break_even->interpolated_fraction) + " interpolated"
                        : std::string("ROI stays negative on the whole grid")) +
          "\n";
    md += "- Diminishing returns: F1 from " + optional_fraction(d.diminishing_f1) + ", ROI from " +
          optional_fraction(d.diminishing_roi) + "\n\n";
    md += "| Fraction | n_train | F1 | Cost | Penalty | Benefit | ROI |\n";
    md += "|---:|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& p : t.curve->points) {
      md += "| " + format_decimal(p.fraction) + " | " + std::to_string(p.n_train) + " | " + format_decimal(p.f1) +
            " | " + format_decimal(p.econ.cost_usd) + " | " + format_decimal(p.econ.penalty_usd) + " | " +
            format_decimal(p.econ.benefit_usd) + " | " + format_decimal(p.econ.roi) + " |\n";
    }
  }

  const bool any_scenarios =
      std::any_of(techniques.begin(), techniques.end(), [](const auto& t) { return !t.scenarios.empty(); });
  if (any_scenarios) {
    md += "\n## Scenarios\n\n";
    md += "| Technique | Scenario | Max ROI | Fraction at max ROI | Break-even (grid) |\n";
    md += "|---|---|---:|---:|---:|\n";
    for (const auto& t : techniques) {
      for (const auto& s : t.scenarios) {
        md += "| " + t.decisions.technique_label + " | " + s.name + " | " + format_decimal(s.summary.max_roi.roi) +
              " | " + format_decimal(s.summary.max_roi.fraction) + " | " +
              (s.summary.break_even ? format_decimal(s.summary.break_even->grid_fraction) : std::string("none")) +
              " |\n";
      }
    }
  }

  if (!artifacts.empty()) {
    md += "\n## Artifacts\n\n";
    for (const auto& a : artifacts) md += "- [" + a.label + "](" + a.path + ")\n";
  }
  return md;
}

}  // namespace roiml::report
