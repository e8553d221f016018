#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "roiml/error.hpp"
#include "roiml/harness.hpp"

namespace testing {

// Independent of the library's Rng so that generators never share state or
// bugs with the code under test.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Inclusive range; slight modulo bias is irrelevant for test inputs.
  std::uint64_t range(std::uint64_t lo, std::uint64_t hi) { return lo + next() % (hi - lo + 1); }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double real(double lo, double hi) { return lo + (hi - lo) * unit(); }

  bool coin() { return (next() & 1U) != 0; }

 private:
  std::uint64_t state_;
};

// Error code raised by `body`, or nothing when it returns normally.
inline std::optional<roiml::ErrorCode> error_code_of(const std::function<void()>& body) {
  try {
    body();
  } catch (const roiml::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline std::string error_message_of(const std::function<void()>& body) {
  try {
    body();
  } catch (const roiml::Error& e) {
    return e.what();
  }
  return {};
}

inline bool close_rel(double a, double b, double tol) {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= tol * scale;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::filesystem::path source_dir() { return ROIML_TEST_SOURCE_DIR; }

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::path(ROIML_TEST_BINARY_DIR) / "scratch" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Curve whose points carry the given metric values directly.
inline roiml::harness::LearningCurve curve_with(const std::string& label, const std::vector<double>& fractions,
                                                const std::vector<double>& roi, const std::vector<double>& f1 = {}) {
  roiml::harness::LearningCurve c;
  c.technique_label = label;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    roiml::harness::CurvePoint p;
    p.fraction = fractions[i];
    p.n_train = 10 * (i + 1);
    p.n_test = 10;
    p.econ.roi = roi.empty() ? 0.0 : roi[i];
    p.f1 = f1.empty() ? 0.0 : f1[i];
    c.points.push_back(p);
  }
  return c;
}

}  // namespace testing
