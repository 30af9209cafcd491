#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>

namespace glsc::rng {

// Seeded streams reproduce bit-for-bit with any standard library.

inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(std::mt19937_64& gen, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(gen) * static_cast<double>(n)));
}

// Inclusive range.
inline std::int64_t uniform_int(std::mt19937_64& gen, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(uniform_index(gen, static_cast<std::size_t>(hi - lo + 1)));
}

inline bool bernoulli(std::mt19937_64& gen, double p) { return uniform01(gen) < p; }

// Box-Muller, one value per call.
inline double standard_normal(std::mt19937_64& gen) {
  double u1 = uniform01(gen);
  while (u1 <= 0.0) u1 = uniform01(gen);
  const double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace glsc::rng
