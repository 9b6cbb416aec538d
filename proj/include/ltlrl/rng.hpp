#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ltlrl {

using Rng = std::mt19937_64;

// Portable sampling primitives. std::uniform_*_distribution output is
// implementation-defined, so seeded runs would not reproduce across
// standard libraries; these do.

inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

inline double uniform_real01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Inverse-CDF draw from an explicit (value, weight) list; weights are
// assumed to sum to ~1 and the last entry absorbs rounding slack.
template <typename T>
const T& sample_weighted(const std::vector<std::pair<T, double>>& dist,
                         Rng& rng) {
  double u = uniform_real01(rng);
  double acc = 0.0;
  for (const auto& [value, weight] : dist) {
    acc += weight;
    if (u < acc) return value;
  }
  return dist.back().first;
}

}  // namespace ltlrl
