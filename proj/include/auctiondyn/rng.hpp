#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace auctiondyn {

// Reproducibility contract: all randomness flows through std::mt19937_64
// seeded via derive_seed, and doubles are produced by uniform_double below.
// Engine output is specified bit-for-bit by the C++ standard, so seeded runs
// are stable across platforms and releases.

/// splitmix64 step (Steele, Lea, Flood 2014 mixing constants).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Per-(trial, bidder) stream seed derived from the master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                                 std::uint64_t bidder) {
  std::uint64_t s = splitmix64(master ^ (0x9E3779B97F4A7C15ULL * (trial + 1)));
  return splitmix64(s ^ (0xBF58476D1CE4E5B9ULL * (bidder + 1)));
}

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
/// std::uniform_real_distribution is not bit-stable across standard
/// libraries; this conversion is.
inline double uniform_double(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Samples an index from non-negative weights summing to total.
/// Expects total > 0; the last positive-weight index absorbs rounding.
inline int sample_weighted(std::span<const double> weights, double total,
                           std::mt19937_64& gen) {
  double r = uniform_double(gen) * total;
  double acc = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) last_positive = static_cast<int>(i);
    acc += weights[i];
    if (r < acc) return static_cast<int>(i);
  }
  return last_positive;
}

}  // namespace auctiondyn
