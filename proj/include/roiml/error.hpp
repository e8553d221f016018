#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace roiml {

/// Failure categories shared by every module. The numeric values are part of
/// the C API (see roiml.h) and must stay stable.
enum class ErrorCode : int {
  Parse = 1,
  Schema = 2,
  Corpus = 3,
  Capacity = 4,
  Imbalance = 5,
  Size = 6,
  Range = 7,
  Fit = 8,
  DegenerateData = 9,
  Parameter = 10,
  Evaluation = 11,
  UndefinedRoi = 12,
  Comparability = 13,
  Chart = 14,
  Config = 15,
  Io = 16,
  Curve = 17,
  Usage = 18,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a category and the module that raised it. what() is
/// module-qualified, e.g. "corpus: duplicate id '100'".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message),
        code_(code),
        module_(std::move(module)),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string module_;
  std::string message_;
};

}  // namespace roiml
