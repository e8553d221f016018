#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "roiml/corpus.hpp"
#include "roiml/harness.hpp"
#include "roiml/roi.hpp"

namespace roiml::config {

struct DatasetConfig {
  std::filesystem::path input;   // issue export CSV
  std::filesystem::path corpus;  // prebuilt corpus CSV; takes precedence over input
  std::string source_label;
  corpus::ExportSchema schema;
  corpus::DependencyKind kind = corpus::DependencyKind::Requires;
  std::size_t min_words = 3;
};

struct SamplingConfig {
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  std::vector<double> fractions = corpus::default_fractions();
  std::vector<std::uint64_t> repeat_seeds;  // empty = single run
};

enum class TechniqueKind { RandomForest, NaiveBayes, External, CurveFile };
std::string_view to_string(TechniqueKind kind);

struct TechniqueConfig {
  std::string label;
  TechniqueKind kind = TechniqueKind::RandomForest;
  harness::ForestSpec forest;
  harness::NaiveBayesSpec naive_bayes;
  std::string predictions_glob;   // External: absolute glob pattern
  std::filesystem::path curve;    // CurveFile: a curve CSV to reprice
};

struct EconomicsConfig {
  std::string profile = "table5-default";
  roi::CostParameters parameters;  // profile plus overrides
  std::vector<harness::Scenario> scenarios;
  harness::CostMode cost_mode = harness::CostMode::PerIteration;
  harness::DecisionOptions decisions;
};

struct RunConfig {
  DatasetConfig dataset;
  SamplingConfig sampling;
  std::vector<TechniqueConfig> techniques;
  EconomicsConfig economics;
  std::filesystem::path output = "roiml-out";
  nlohmann::ordered_json effective;  // the document after overrides, paths as written
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> fractions;
  std::optional<std::string> external_predictions;
  std::optional<std::filesystem::path> output;
};

/// Parses and validates a config document. Relative paths resolve against
/// `base_dir`. Throws Error(Config) naming the offending key.
RunConfig parse(std::string_view json_text, const std::filesystem::path& base_dir, const Overrides& overrides = {});

RunConfig load(const std::filesystem::path& path, const Overrides& overrides = {});

/// "0.1,0.2,0.3" -> {0.1, 0.2, 0.3}
std::vector<double> parse_fraction_list(std::string_view text);

/// Training fraction encoded in a prediction file name: the last number in
/// the stem, read as a percentage when it exceeds 1 ("bert_40.csv" -> 0.40).
std::optional<double> fraction_from_filename(std::string_view filename);

/// Files matching a glob pattern, sorted.
std::vector<std::filesystem::path> expand_glob(const std::string& pattern);

/// Whether any technique needs the pair corpus (everything except curve files).
bool needs_corpus(const RunConfig& config);

}  // namespace roiml::config
