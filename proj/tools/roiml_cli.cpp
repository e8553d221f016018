// roiml: learning curves priced by return on investment.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "roiml.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitUsage = 64;

void print_error(const std::string& status, int code, const std::string& module, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = {{"status", status}, {"code", code}, {"module", module}, {"message", message}};
  std::cerr << j.dump() << '\n';
}

roiml_log_level level_from_env() {
  const char* value = std::getenv("ROIML_LOG");
  if (!value) return ROIML_LOG_WARN;
  const std::string v = value;
  if (v == "error" || v == "0") return ROIML_LOG_ERROR;
  if (v == "info" || v == "2") return ROIML_LOG_INFO;
  if (v == "debug" || v == "3") return ROIML_LOG_DEBUG;
  return ROIML_LOG_WARN;
}

void log_to_stderr(roiml_log_level level, const char* message, void*) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "roiml [%s] %s\n", names[level], message);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning curves for text classifiers, priced by return on investment."};
  app.set_version_flag("--version", std::string(roiml_version()));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> fractions;
  std::optional<std::string> external;

  const std::pair<const char*, const char*> commands[] = {
      {"ingest", "parse an issue export into a requirement set"},
      {"pairs", "build the balanced pair corpus, split and training schedule"},
      {"curve", "run learning curves and write curve CSV and JSON"},
      {"compare", "run curves and report crossovers with overlay charts"},
      {"scenario", "re-price curves under the configured cost scenarios"},
      {"report", "write curves, charts, scenarios and a markdown summary"},
      {"validate-config", "check a config and echo the effective economics"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "sampling seed (overrides the config)");
    sub->add_option("--fractions", fractions, "comma-separated training fractions, e.g. 0.1,0.2,0.4");
    sub->add_option("--external-preds", external, "glob of interchange prediction files, one per fraction");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help();
    print_error("usage_error", ROIML_E_USAGE, "cli", e.what());
    return kExitUsage;
  }

  roiml_set_log_callback(log_to_stderr, nullptr, level_from_env());

  roiml_run_request request{};
  const std::string subcommand = app.get_subcommands().front()->get_name();
  request.subcommand = subcommand.c_str();
  request.config_path = config_path.c_str();
  request.output_dir = out_dir ? out_dir->c_str() : nullptr;
  request.has_seed = seed.has_value();
  request.seed = seed.value_or(0);
  request.fractions = fractions ? fractions->c_str() : nullptr;
  request.external_predictions = external ? external->c_str() : nullptr;

  roiml_run_result* result = nullptr;
  const roiml_status status = roiml_run(&request, &result);
  if (status != ROIML_OK) {
    print_error(roiml_status_name(status), status, roiml_last_error_module(), roiml_last_error());
    if (status == ROIML_E_USAGE) return kExitUsage;
    return status == ROIML_E_CONFIG ? kExitValidation : kExitRuntime;
  }
  std::fputs(roiml_run_stdout(result), stdout);
  for (std::size_t i = 0; i < roiml_run_warning_count(result); ++i) {
    std::fprintf(stderr, "warning: %s\n", roiml_run_warning(result, i));
  }
  roiml_run_result_free(result);
  return kExitOk;
}
