#include <doctest.h>

#include <string>
#include <vector>

#include "roiml/csv.hpp"
#include "roiml/error.hpp"
#include "roiml/harness.hpp"
#include "roiml/report.hpp"
#include "roiml/roi.hpp"
#include "support.hpp"

using namespace roiml;
using namespace roiml::report;
using testing::error_code_of;

namespace {

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

harness::LearningCurve oracle_curve() {
  harness::LearningCurve c;
  c.technique_label = "rf";
  harness::CurvePoint p;
  p.fraction = 0.5;
  p.n_train = 900;
  p.n_test = 100;
  p.cm = {45, 10, 5, 40};
  c.points.push_back(p);
  return harness::reprice(c, roi::CostParameters{});
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("single-point curve CSV has a header and one row") {
    const auto text = emit_curve_csv(oracle_curve());
    CHECK(count_of(text, "\n") == 2);
    CHECK(text.rfind("fraction,n_train,n_test,tp,fp,fn,tn,precision,recall,f1,cost_usd,penalty_usd,benefit_usd,roi\n",
                     0) == 0);
    CHECK(text.find('\r') == std::string::npos);
  }

  TEST_CASE("ROI is rendered at six decimals") {
    const auto text = emit_curve_csv(oracle_curve());
    CHECK(text.find(",21000.000000,225000.000000,3775000.000000,178.761905\n") != std::string::npos);
    CHECK(csv::format_decimal(178.7619047) == "178.761905");
    CHECK(csv::format_decimal(-0.0000001) == "0.000000");
  }

  TEST_CASE("curve CSV round-trip replays economics exactly") {
    const auto c = oracle_curve();
    const auto back = harness::read_curve_csv(emit_curve_csv(c), "rf", c.parameters);
    CHECK(back.points[0].econ == c.points[0].econ);
    CHECK(emit_curve_csv(back) == emit_curve_csv(c));
  }

  TEST_CASE("two-series overlay has two polylines and two legend entries") {
    const auto a = testing::curve_with("rf", {0.1, 0.2, 0.3}, {1, 2, 3});
    const auto b = testing::curve_with("rdc-bert", {0.1, 0.2, 0.3}, {0.5, 2.5, 4});
    const auto svg = render_chart(overlay_chart({&a, &b}, harness::Metric::Roi, "ROI"));
    CHECK(count_of(svg, "<polyline") == 2);
    CHECK(svg.find(">rf</text>") != std::string::npos);
    CHECK(svg.find(">rdc-bert</text>") != std::string::npos);
    CHECK(svg.find("width=\"800\" height=\"500\"") != std::string::npos);
    CHECK(svg.find("version=\"1.1\"") != std::string::npos);
  }

  TEST_CASE("single-point series draws a marker and no polyline") {
    ChartSpec spec;
    spec.title = "one";
    spec.x = {"fraction", ""};
    spec.y = {"ROI", ""};
    spec.series.push_back({"only", {{0.5, 2.0}}, false});
    const auto svg = render_chart(spec);
    CHECK(count_of(svg, "<polyline") == 0);
    CHECK(count_of(svg, "<circle") == 1);
  }

  TEST_CASE("charts are byte-deterministic") {
    const auto c = testing::curve_with("rf", {0.1, 0.2, 0.3}, {-1, 2, 3}, {0.5, 0.6, 0.7});
    CHECK(render_chart(f1_roi_chart(c)) == render_chart(f1_roi_chart(c)));
  }

  TEST_CASE("chart errors") {
    ChartSpec empty;
    CHECK(error_code_of([&] { render_chart(empty); }) == ErrorCode::Chart);
    ChartSpec unsorted;
    unsorted.series.push_back({"s", {{0.2, 1.0}, {0.1, 2.0}}, false});
    CHECK(error_code_of([&] { render_chart(unsorted); }) == ErrorCode::Chart);
  }

  TEST_CASE("summary ranks techniques by max ROI") {
    const auto low = testing::curve_with("rf", {0.1, 0.2}, {1.0, 2.2});
    const auto high = testing::curve_with("rdc-bert", {0.1, 0.2}, {5.0, 30.0});
    const std::vector<TechniqueReport> techniques = {
        {&low, harness::summarize(low, {&high}), {}},
        {&high, harness::summarize(high, {&low}), {}},
    };
    const auto md = emit_summary(techniques, {{"rf curve", "curves/rf.csv"}});
    const auto first = md.find("| 1 | rdc-bert |");
    const auto second = md.find("| 2 | rf |");
    REQUIRE(first != std::string::npos);
    REQUIRE(second != std::string::npos);
    CHECK(first < second);
    CHECK(md.find("[rf curve](curves/rf.csv)") != std::string::npos);
    CHECK(md.find("## Scenarios") == std::string::npos);
  }

  TEST_CASE("summary without a rival shows a dash for crossovers") {
    const auto c = testing::curve_with("rf", {0.1, 0.2}, {1.0, 2.0});
    const auto md = emit_summary({{&c, harness::summarize(c), {}}}, {});
    CHECK(md.find("| — | — |") != std::string::npos);
  }

  TEST_CASE("summary includes a scenario table when scenarios exist") {
    const auto c = oracle_curve();
    auto worst = c.parameters;
    worst.cost_fn *= 2;
    const auto scenarios = harness::scenario_analysis(c, {{"worst-case", worst}});
    const auto md = emit_summary({{&c, harness::summarize(c), scenarios}}, {});
    CHECK(md.find("## Scenarios") != std::string::npos);
    CHECK(md.find("| rf | worst-case |") != std::string::npos);
  }

  TEST_CASE("summary numbers come from the CSV values") {
    const auto c = oracle_curve();
    const auto md = emit_summary({{&c, harness::summarize(c), {}}}, {});
    CHECK(md.find("178.761905") != std::string::npos);
    CHECK(emit_summary({{&c, harness::summarize(c), {}}}, {}) == md);
  }
}

TEST_SUITE("csv") {
  TEST_CASE("quoted fields with separators, quotes and newlines") {
    const auto rows = csv::parse("a,b\n\"x, y\",\"say \"\"hi\"\"\nthere\"\r\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].fields[0] == "x, y");
    CHECK(rows[1].fields[1] == "say \"hi\"\nthere");
  }

  TEST_CASE("escape and format_row round-trip") {
    const std::vector<std::string> fields = {"plain", "with,comma", "with\"quote", ""};
    const auto rows = csv::parse(csv::format_row(fields));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].fields == fields);
    CHECK(csv::escape("plain") == "plain");
  }

  TEST_CASE("BOM is stripped and blank lines skipped") {
    const auto rows = csv::parse("\xEF\xBB\xBFid\n\n1\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].fields[0] == "id");
  }

  TEST_CASE("stray characters after a closing quote are a parse error") {
    CHECK(error_code_of([] { csv::parse("\"a\"b\n"); }) == ErrorCode::Parse);
  }
}
