#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "nmchaos/params.hpp"

namespace testutil {

inline double rel_diff(double a, double b, double floor = 1e-300) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline nmchaos::FullState observables(double q1, double q2, double p1, double p2, double n) {
  nmchaos::FullState s;
  s.obs = {q1, q2, p1, p2, n};
  return s;
}

inline nmchaos::FullState fig2_init() { return observables(1.1, 1.1, 0.0, 0.0, 2.0); }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  auto dir = std::filesystem::temp_directory_path() /
             ("nmchaos_" + tag + "_" + std::to_string(rng()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
