#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "polylab/environment.hpp"

namespace polylab::fixtures {

inline double relative_error(double a, double b) {
  if (a == b) return 0.0;
  return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
}

inline EnvironmentField lognormal(double beta, std::uint64_t seed) {
  return EnvironmentField(EnvironmentSpec{LogNormalLaw{beta}, seed});
}

inline EnvironmentField two_point(double a, double b, double p, std::uint64_t seed) {
  return EnvironmentField(EnvironmentSpec{TwoPointLaw{a, b, p}, seed});
}

/// Fresh empty directory under the system temp dir, unique per test name.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("polylab_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace polylab::fixtures
