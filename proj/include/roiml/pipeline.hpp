#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace roiml::pipeline {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

using LogSink = std::function<void(LogLevel, const std::string&)>;

/// Messages above `level` are dropped. An empty sink silences everything.
void set_log_sink(LogSink sink, LogLevel level);
void log(LogLevel level, const std::string& message);

struct Request {
  std::string subcommand;
  std::filesystem::path config_path;
  std::optional<std::filesystem::path> output;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> fractions;  // "0.1,0.2"
  std::optional<std::string> external_predictions;
};

struct Outcome {
  std::string stdout_text;
  std::vector<std::string> warnings;
  std::vector<std::string> artifacts;  // relative to the output directory
};

std::vector<std::string> subcommands();

/// Runs one subcommand. Config problems throw Error(Config); an unknown
/// subcommand throws Error(Usage) before anything is read.
Outcome run(const Request& request);

}  // namespace roiml::pipeline
