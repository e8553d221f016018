#include "roiml/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "roiml/config.hpp"
#include "roiml/corpus.hpp"
#include "roiml/csv.hpp"
#include "roiml/error.hpp"
#include "roiml/harness.hpp"
#include "roiml/random.hpp"
#include "roiml/report.hpp"
#include "roiml/roi.hpp"

#ifndef ROIML_VERSION
#define ROIML_VERSION "0.0.0"
#endif

namespace roiml::pipeline {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Stream ids for seeds derived from sampling.seed.
constexpr std::uint64_t kNegativeStream = 0x4E45;
constexpr std::uint64_t kBalanceStream = 0xBA1A;

std::mutex log_mutex;
LogSink log_sink;
LogLevel log_level = LogLevel::Warn;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cli", "cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "cli", "SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

// Integers print without a decimal part so echoed parameters read naturally.
std::string format_number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.10g", v);
  return buffer;
}

std::string fraction_tag(double f) {
  const double percent = f * 100.0;
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, std::fabs(percent - std::round(percent)) < 1e-9 ? "%.2f" : "%.4f", f);
  return buffer;
}

// Writes go to a sibling temp file first, so readers never see partial output.
class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) {}

  void write(const std::string& relative, const std::string& content) {
    const fs::path target = root_ / relative;
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw Error(ErrorCode::Io, "cli", "cannot create '" + target.parent_path().string() + "'");
    const fs::path temp = target.string() + ".tmp";
    {
      std::ofstream out(temp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorCode::Io, "cli", "cannot write '" + temp.string() + "'");
      out << content;
      if (!out.flush()) throw Error(ErrorCode::Io, "cli", "cannot write '" + temp.string() + "'");
    }
    fs::rename(temp, target, ec);
    if (ec) throw Error(ErrorCode::Io, "cli", "cannot move output into place at '" + target.string() + "'");
    written_[relative] = sha256_hex(content);
    log(LogLevel::Debug, "wrote " + target.string());
  }

  const fs::path& root() const { return root_; }
  const std::map<std::string, std::string>& written() const { return written_; }

 private:
  fs::path root_;
  std::map<std::string, std::string> written_;
};

struct Context {
  config::RunConfig config;
  std::string config_hash;
  std::string subcommand;
};

void warn(std::vector<std::string>* sink, const std::string& message) {
  log(LogLevel::Warn, message);
  if (sink) sink->push_back(message);
}

corpus::RequirementSet ingest(const config::RunConfig& config, Json* stats,
                              std::vector<std::string>* warnings = nullptr) {
  const auto& d = config.dataset;
  if (d.input.empty()) throw Error(ErrorCode::Config, "config", "dataset.input is required to ingest an issue export");
  const std::string label = d.source_label.empty() ? d.input.stem().string() : d.source_label;
  auto parsed = corpus::parse_issue_export(read_file(d.input), d.schema, label);
  auto filtered = corpus::filter_short(parsed.set, d.min_words);
  if (parsed.skipped_empty_id) warn(warnings, std::to_string(parsed.skipped_empty_id) + " row(s) skipped for an empty id");
  if (parsed.skipped_empty_description) {
    warn(warnings, std::to_string(parsed.skipped_empty_description) + " row(s) skipped for an empty description");
  }
  if (stats) {
    (*stats)["source_label"] = label;
    (*stats)["records_kept"] = filtered.set.records.size();
    (*stats)["skipped_empty_id"] = parsed.skipped_empty_id;
    (*stats)["skipped_empty_description"] = parsed.skipped_empty_description;
    (*stats)["removed_short"] = filtered.removed;
    (*stats)["min_words"] = d.min_words;
  }
  return std::move(filtered.set);
}

corpus::PairCorpus load_corpus(const config::RunConfig& config, Json* stats,
                               std::vector<std::string>* warnings = nullptr) {
  if (!config.dataset.corpus.empty()) {
    auto c = corpus::read_corpus_csv(read_file(config.dataset.corpus));
    if (stats) {
      (*stats)["source"] = "corpus";
      (*stats)["pairs"] = c.size();
    }
    return c;
  }
  Json ingest_stats;
  auto set = ingest(config, &ingest_stats, warnings);
  auto extracted = corpus::extract_positive_pairs(set, config.dataset.kind);
  if (extracted.dangling) {
    warn(warnings, std::to_string(extracted.dangling) + " link(s) point outside the requirement set");
  }
  const std::uint64_t seed = config.sampling.seed;
  auto negatives = corpus::generate_negative_pairs(set, extracted.pairs, extracted.pairs.size(),
                                                   derive_seed(seed, kNegativeStream));
  auto c = corpus::build_corpus(std::move(extracted.pairs), std::move(negatives), derive_seed(seed, kBalanceStream));
  if (stats) {
    (*stats)["source"] = "issue_export";
    (*stats)["ingest"] = ingest_stats;
    (*stats)["dependency_kind"] = std::string(corpus::to_string(config.dataset.kind));
    (*stats)["positives"] = c.positives_count;
    (*stats)["negatives"] = c.negatives_count;
    (*stats)["dangling_links"] = extracted.dangling;
    (*stats)["pairs"] = c.size();
  }
  return c;
}

harness::TrainerSpec trainer_for(const config::TechniqueConfig& t) {
  switch (t.kind) {
    case config::TechniqueKind::RandomForest: return t.forest;
    case config::TechniqueKind::NaiveBayes: return t.naive_bayes;
    case config::TechniqueKind::External: {
      harness::ExternalSpec spec;
      for (const auto& file : config::expand_glob(t.predictions_glob)) {
        const double fraction = *config::fraction_from_filename(file.filename().string());
        for (const auto& [f, unused] : spec.by_fraction) {
          if (std::fabs(f - fraction) < 1e-9) {
            throw Error(ErrorCode::Config, "config", "two prediction files for '" + t.label + "' map to fraction " +
                                                         csv::format_decimal(fraction));
          }
        }
        try {
          spec.by_fraction.emplace_back(fraction, classify::load_external_predictions(read_file(file)).predictions);
        } catch (const Error& e) {
          throw Error(e.code(), e.module(), file.filename().string() + ": " + e.message());
        }
      }
      std::sort(spec.by_fraction.begin(), spec.by_fraction.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      return spec;
    }
    case config::TechniqueKind::CurveFile: break;
  }
  throw Error(ErrorCode::Parameter, "cli", "technique '" + t.label + "' has no trainer");
}

struct TechniqueRun {
  const config::TechniqueConfig* technique = nullptr;
  harness::CurveResult result;
  std::vector<harness::RepeatedPoint> repeated;
};

std::vector<TechniqueRun> run_techniques(const Context& ctx) {
  const auto& config = ctx.config;
  std::optional<corpus::PairCorpus> pairs;
  std::optional<corpus::SplitPlan> plan;
  if (config::needs_corpus(config)) {
    pairs = load_corpus(config, nullptr);
    plan = corpus::split(*pairs, config.sampling.test_fraction, config.sampling.seed);
  }
  const auto& params = config.economics.parameters;
  const auto mode = config.economics.cost_mode;

  std::vector<TechniqueRun> runs;
  for (const auto& t : config.techniques) {
    log(LogLevel::Info, "running technique '" + t.label + "' (" + std::string(config::to_string(t.kind)) + ")");
    TechniqueRun run;
    run.technique = &t;
    if (t.kind == config::TechniqueKind::CurveFile) {
      run.result.curve = harness::read_curve_csv(read_file(t.curve), t.label, params, mode);
      run.result.curve.seed = config.sampling.seed;
    } else {
      const auto trainer = trainer_for(t);
      run.result = harness::run_curve(*pairs, *plan, config.sampling.fractions, trainer, params, t.label, mode);
      if (!config.sampling.repeat_seeds.empty() && t.kind != config::TechniqueKind::External) {
        run.repeated = harness::run_repeated(*pairs, config.sampling.test_fraction, config.sampling.fractions,
                                             trainer, params, config.sampling.repeat_seeds, mode);
      }
    }
    for (const auto& w : run.result.warnings) log(LogLevel::Warn, t.label + ": " + w);
    runs.push_back(std::move(run));
  }
  return runs;
}

std::vector<const harness::LearningCurve*> rivals_of(const std::vector<TechniqueRun>& runs, std::size_t self) {
  std::vector<const harness::LearningCurve*> out;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (i != self) out.push_back(&runs[i].result.curve);
  }
  return out;
}

std::string repeated_csv(const std::vector<harness::RepeatedPoint>& points) {
  std::string out = "fraction,f1_mean,f1_sd,roi_mean,roi_sd\n";
  for (const auto& p : points) {
    out += csv::format_row({csv::format_decimal(p.fraction), csv::format_decimal(p.f1_mean),
                            csv::format_decimal(p.f1_sd), csv::format_decimal(p.roi_mean),
                            csv::format_decimal(p.roi_sd)});
  }
  return out;
}

std::string describe(const harness::DecisionSummary& s) {
  std::string out = s.technique_label + ": max ROI " + csv::format_decimal(s.max_roi.roi) + " at fraction " +
                    csv::format_decimal(s.max_roi.fraction) + " (F1 " + csv::format_decimal(s.max_roi.f1) + ")";
  if (s.break_even) {
    out += ", break-even at " + csv::format_decimal(s.break_even->grid_fraction) + " (interpolated " +
           csv::format_decimal(s.break_even->interpolated_fraction) + ")";
  } else {
    out += ", no break-even";
  }
  return out + "\n";
}

std::vector<harness::DecisionSummary> write_curves(OutputDir& out, const Context& ctx,
                                                   const std::vector<TechniqueRun>& runs, Outcome& outcome) {
  std::vector<harness::DecisionSummary> summaries;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    const auto& curve = run.result.curve;
    const std::string base = "curves/" + curve.technique_label;
    out.write(base + ".csv", report::emit_curve_csv(curve));

    auto summary = harness::summarize(curve, rivals_of(runs, i), ctx.config.economics.decisions);
    Json j;
    j["technique"] = curve.technique_label;
    j["kind"] = std::string(config::to_string(run.technique->kind));
    j["metadata"] = Json::parse(harness::curve_metadata_json(curve));
    j["decisions"] = Json::parse(harness::to_json(summary));
    if (run.result.tuned) {
      j["tuned"] = {{"trees", run.result.tuned->trees}, {"max_depth", run.result.tuned->max_depth}};
    } else {
      j["tuned"] = nullptr;
    }
    j["warnings"] = run.result.warnings;
    auto models = Json::array();
    for (const auto& m : run.result.model_metadata) models.push_back(Json::parse(m));
    j["models"] = models;
    out.write(base + ".json", j.dump(2) + "\n");
    if (!run.repeated.empty()) out.write(base + "_repeated.csv", repeated_csv(run.repeated));

    outcome.stdout_text += describe(summary);
    for (const auto& w : run.result.warnings) outcome.warnings.push_back(curve.technique_label + ": " + w);
    summaries.push_back(std::move(summary));
  }
  return summaries;
}

void write_compare(OutputDir& out, const std::vector<TechniqueRun>& runs, Outcome& outcome) {
  if (runs.size() < 2) {
    throw Error(ErrorCode::Config, "config", "compare needs at least two techniques");
  }
  auto comparisons = Json::array();
  for (std::size_t a = 0; a < runs.size(); ++a) {
    for (std::size_t b = a + 1; b < runs.size(); ++b) {
      std::vector<std::string> warnings;
      auto [ca, cb] = harness::intersect_grids(runs[a].result.curve, runs[b].result.curve, warnings);
      Json c;
      c["a"] = ca.technique_label;
      c["b"] = cb.technique_label;
      std::vector<double> grid;
      for (const auto& p : ca.points) grid.push_back(p.fraction);
      c["grid"] = grid;
      const auto f1 = harness::crossover(ca, cb, harness::Metric::F1);
      const auto roi = harness::crossover(ca, cb, harness::Metric::Roi);
      c["f1"] = f1;
      c["roi"] = roi;
      c["warnings"] = warnings;
      comparisons.push_back(c);
      for (const auto& w : warnings) outcome.warnings.push_back(w);
      auto list = [](const std::vector<double>& xs) {
        std::string s;
        for (double x : xs) s += (s.empty() ? "" : ", ") + csv::format_decimal(x);
        return s.empty() ? std::string("none") : s;
      };
      outcome.stdout_text += ca.technique_label + " vs " + cb.technique_label + ": F1 crossovers " + list(f1) +
                             "; ROI crossovers " + list(roi) + "\n";
    }
  }
  Json doc;
  doc["comparisons"] = comparisons;
  out.write("compare/crossovers.json", doc.dump(2) + "\n");

  std::vector<const harness::LearningCurve*> curves;
  for (const auto& r : runs) curves.push_back(&r.result.curve);
  out.write("compare/overlay_f1.svg",
            report::render_chart(report::overlay_chart(curves, harness::Metric::F1, "F1 by training fraction")));
  out.write("compare/overlay_roi.svg",
            report::render_chart(report::overlay_chart(curves, harness::Metric::Roi, "ROI by training fraction")));
}

std::string optional_cell(const std::optional<double>& v) { return v ? csv::format_decimal(*v) : std::string(); }

std::vector<std::vector<harness::ScenarioResult>> write_scenarios(OutputDir& out, const Context& ctx,
                                                                 const std::vector<TechniqueRun>& runs,
                                                                 Outcome& outcome) {
  const auto& scenarios = ctx.config.economics.scenarios;
  if (scenarios.empty()) {
    throw Error(ErrorCode::Config, "config", "economics.scenarios is empty; the scenario table needs at least one");
  }
  std::vector<std::vector<harness::ScenarioResult>> all;
  for (const auto& run : runs) {
    const auto& curve = run.result.curve;
    auto results = harness::scenario_analysis(curve, scenarios, ctx.config.economics.decisions);
    std::string table =
        "scenario,max_roi_fraction,max_roi,f1_at_max_roi,break_even_fraction,break_even_interpolated,"
        "diminishing_f1,diminishing_roi\n";
    Json j = Json::array();
    for (const auto& r : results) {
      const auto& s = r.summary;
      table += csv::format_row(
          {r.name, csv::format_decimal(s.max_roi.fraction), csv::format_decimal(s.max_roi.roi),
           csv::format_decimal(s.max_roi.f1),
           s.break_even ? csv::format_decimal(s.break_even->grid_fraction) : std::string(),
           s.break_even ? csv::format_decimal(s.break_even->interpolated_fraction) : std::string(),
           optional_cell(s.diminishing_f1), optional_cell(s.diminishing_roi)});
      Json entry;
      entry["name"] = r.name;
      entry["parameters"] = Json::parse(roi::to_json(r.parameters));
      entry["decisions"] = Json::parse(harness::to_json(s));
      j.push_back(entry);
      outcome.stdout_text += "[" + r.name + "] " + describe(s);
    }
    out.write("scenarios/" + curve.technique_label + ".csv", table);
    out.write("scenarios/" + curve.technique_label + ".json", j.dump(2) + "\n");
    all.push_back(std::move(results));
  }
  return all;
}

void write_manifest(OutputDir& out, const Context& ctx) {
  Json j;
  j["tool"] = "roiml";
  j["version"] = ROIML_VERSION;
  j["subcommand"] = ctx.subcommand;
  j["config_sha256"] = ctx.config_hash;
  j["seeds"] = {{"sampling", ctx.config.sampling.seed},
                {"negative_sampling", derive_seed(ctx.config.sampling.seed, kNegativeStream)},
                {"balancing", derive_seed(ctx.config.sampling.seed, kBalanceStream)},
                {"repeat", ctx.config.sampling.repeat_seeds}};
  j["config"] = ctx.config.effective;
  auto artifacts = Json::array();
  for (const auto& [path, hash] : out.written()) artifacts.push_back({{"path", path}, {"sha256", hash}});
  j["artifacts"] = artifacts;
  out.write("manifest.json", j.dump(2) + "\n");
}

Outcome validate_only(const Context& ctx) {
  const auto& c = ctx.config;
  const auto& p = c.economics.parameters;
  std::string s = "config ok\n";
  s += "config_sha256=" + ctx.config_hash + "\n";
  s += "profile=" + c.economics.profile + "\n";
  s += "cost_fn=" + format_number(p.cost_fn) + "\n";
  s += "cost_fp=" + format_number(p.cost_fp) + "\n";
  s += "value_prod=" + format_number(p.value_prod) + "\n";
  s += "c_hr=" + format_number(p.c_hr) + "\n";
  s += "n_hr=" + std::to_string(p.n_hr) + "\n";
  s += "c_pl=" + format_number(p.c_pl) + "\n";
  s += "c_dg=" + format_number(p.c_dg) + "\n";
  s += "c_pp=" + format_number(p.c_pp) + "\n";
  s += "c_l=" + format_number(p.c_l) + "\n";
  s += "c_t=" + format_number(p.c_t) + "\n";
  s += "c_train_test=" + format_number(p.c_train_test) + "\n";
  s += "c_e=" + format_number(p.c_e) + "\n";
  s += "cost_mode=" + std::string(harness::to_string(c.economics.cost_mode)) + "\n";
  s += "seed=" + std::to_string(c.sampling.seed) + "\n";
  s += "test_fraction=" + format_number(c.sampling.test_fraction) + "\n";
  std::string fractions;
  for (double f : c.sampling.fractions) fractions += (fractions.empty() ? "" : ",") + format_number(f);
  s += "fractions=" + fractions + "\n";
  for (const auto& t : c.techniques) s += "technique=" + t.label + " (" + std::string(config::to_string(t.kind)) + ")\n";
  for (const auto& sc : c.economics.scenarios) s += "scenario=" + sc.name + "\n";
  s += "output=" + c.output.string() + "\n";
  Outcome outcome;
  for (const auto& note : roi::advisories(p)) {
    s += "advisory: " + note + "\n";
    outcome.warnings.push_back(note);
  }
  outcome.stdout_text = std::move(s);
  return outcome;
}

std::string subset_csv(const corpus::PairCorpus& c, const std::vector<std::size_t>& indices) {
  // Same columns as the corpus file; pair_id keeps the corpus index so
  // predictions can be matched back to the test set.
  std::string out = "pair_id,left_id,right_id,label,kind,combined_text\n";
  for (auto idx : indices) {
    const auto& p = c.pairs[idx];
    out += csv::format_row({std::to_string(idx), p.left, p.right, std::to_string(p.label.value()),
                            std::string(corpus::to_string(p.label.kind)), p.combined_text});
  }
  return out;
}

void write_pairs(OutputDir& out, const Context& ctx, Outcome& outcome) {
  const auto& config = ctx.config;
  Json stats;
  const auto c = load_corpus(config, &stats, &outcome.warnings);
  const auto plan = corpus::split(c, config.sampling.test_fraction, config.sampling.seed);
  const auto schedule = corpus::fraction_schedule(c, plan, config.sampling.fractions);
  out.write("pairs/corpus.csv", corpus::write_corpus_csv(c));
  out.write("pairs/split.csv", corpus::write_split_csv(plan));
  out.write("pairs/schedule.csv", corpus::write_schedule_csv(config.sampling.fractions, schedule));
  out.write("pairs/split.json", corpus::write_split_json(c, plan, config.sampling.fractions, schedule));
  out.write("pairs/corpus_stats.json", stats.dump(2) + "\n");
  std::vector<std::size_t> test(plan.test_set.begin(), plan.test_set.end());
  std::sort(test.begin(), test.end());
  out.write("pairs/test.csv", subset_csv(c, test));
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    out.write("pairs/train_" + fraction_tag(config.sampling.fractions[i]) + ".csv", subset_csv(c, schedule[i]));
  }
  outcome.stdout_text += "pairs: " + std::to_string(c.size()) + " (" + std::to_string(c.positives_count) +
                         " dependent, " + std::to_string(c.negatives_count) + " independent)\n";
  outcome.stdout_text += "test set: " + std::to_string(plan.test_set.size()) + ", train pool: " +
                         std::to_string(plan.train_pool.size()) + ", fractions: " +
                         std::to_string(schedule.size()) + "\n";
}

void write_ingest(OutputDir& out, const Context& ctx, Outcome& outcome) {
  Json stats;
  const auto set = ingest(ctx.config, &stats, &outcome.warnings);
  out.write("ingest/requirements.csv", corpus::write_requirements_csv(set));
  out.write("ingest/ingest.json", stats.dump(2) + "\n");
  outcome.stdout_text += "requirements: " + std::to_string(set.records.size()) + " kept, " +
                         std::to_string(stats["removed_short"].get<std::size_t>()) + " too short, " +
                         std::to_string(stats["skipped_empty_description"].get<std::size_t>()) +
                         " without description\n";
}

void write_report(OutputDir& out, const Context& ctx, const std::vector<TechniqueRun>& runs, Outcome& outcome) {
  auto summaries = write_curves(out, ctx, runs, outcome);
  std::vector<report::Artifact> artifacts;
  for (const auto& r : runs) {
    const auto& label = r.result.curve.technique_label;
    artifacts.push_back({label + " curve (CSV)", "curves/" + label + ".csv"});
    artifacts.push_back({label + " decisions (JSON)", "curves/" + label + ".json"});
    const std::string chart = "charts/" + label + "_f1_roi.svg";
    out.write(chart, report::render_chart(report::f1_roi_chart(r.result.curve)));
    artifacts.push_back({label + " F1 and ROI chart", chart});
  }
  if (runs.size() >= 2) {
    write_compare(out, runs, outcome);
    artifacts.push_back({"crossovers (JSON)", "compare/crossovers.json"});
    artifacts.push_back({"F1 overlay", "compare/overlay_f1.svg"});
    artifacts.push_back({"ROI overlay", "compare/overlay_roi.svg"});
  }
  std::vector<std::vector<harness::ScenarioResult>> scenarios;
  if (!ctx.config.economics.scenarios.empty()) {
    scenarios = write_scenarios(out, ctx, runs, outcome);
    for (const auto& r : runs) {
      const auto& label = r.result.curve.technique_label;
      artifacts.push_back({label + " scenarios (CSV)", "scenarios/" + label + ".csv"});
    }
  }
  std::vector<report::TechniqueReport> reports;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    report::TechniqueReport tr;
    tr.curve = &runs[i].result.curve;
    tr.decisions = summaries[i];
    if (!scenarios.empty()) tr.scenarios = scenarios[i];
    reports.push_back(std::move(tr));
  }
  out.write("report.md", report::emit_summary(reports, artifacts));
  outcome.stdout_text += "report: " + (out.root() / "report.md").string() + "\n";
}

}  // namespace

void set_log_sink(LogSink sink, LogLevel level) {
  std::lock_guard lock(log_mutex);
  log_sink = std::move(sink);
  log_level = level;
}

void log(LogLevel level, const std::string& message) {
  std::lock_guard lock(log_mutex);
  if (log_sink && level <= log_level) log_sink(level, message);
}

std::vector<std::string> subcommands() {
  return {"ingest", "pairs", "curve", "compare", "scenario", "report", "validate-config"};
}

Outcome run(const Request& request) {
  const auto names = subcommands();
  if (std::find(names.begin(), names.end(), request.subcommand) == names.end()) {
    throw Error(ErrorCode::Usage, "cli", "unknown subcommand '" + request.subcommand + "'");
  }

  config::Overrides overrides;
  overrides.seed = request.seed;
  overrides.output = request.output;
  overrides.external_predictions = request.external_predictions;
  if (request.fractions) {
    try {
      overrides.fractions = config::parse_fraction_list(*request.fractions);
    } catch (const Error& e) {
      throw Error(ErrorCode::Config, "config", "--fractions: " + e.message());
    }
  }

  Context ctx;
  ctx.subcommand = request.subcommand;
  ctx.config = config::load(request.config_path, overrides);
  ctx.config_hash = sha256_hex(ctx.config.effective.dump());
  log(LogLevel::Info, "config " + request.config_path.string() + " sha256 " + ctx.config_hash);

  if (request.subcommand == "validate-config") return validate_only(ctx);

  Outcome outcome;
  OutputDir out(ctx.config.output);
  if (request.subcommand == "ingest") {
    write_ingest(out, ctx, outcome);
  } else if (request.subcommand == "pairs") {
    write_pairs(out, ctx, outcome);
  } else {
    if (request.subcommand == "compare" && ctx.config.techniques.size() < 2) {
      throw Error(ErrorCode::Config, "config", "compare needs at least two techniques");
    }
    if (request.subcommand == "scenario" && ctx.config.economics.scenarios.empty()) {
      throw Error(ErrorCode::Config, "config", "economics.scenarios is empty; the scenario table needs at least one");
    }
    const auto runs = run_techniques(ctx);
    if (request.subcommand == "curve") {
      write_curves(out, ctx, runs, outcome);
    } else if (request.subcommand == "compare") {
      write_curves(out, ctx, runs, outcome);
      write_compare(out, runs, outcome);
    } else if (request.subcommand == "scenario") {
      write_scenarios(out, ctx, runs, outcome);
    } else {
      write_report(out, ctx, runs, outcome);
    }
  }
  write_manifest(out, ctx);
  for (const auto& [path, hash] : out.written()) outcome.artifacts.push_back(path);
  return outcome;
}

}  // namespace roiml::pipeline
