#pragma once

#include <cstdint>
#include <random>

namespace ordcover {

using Rng = std::mt19937_64;

/// Independent stream for sample `index` of a run seeded with `seed`.
/// Streams depend only on (seed, index), so parallel evaluation order does
/// not affect results.
inline Rng split_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x6f7264u};
  return Rng(seq);
}

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline long long uniform_int(Rng& rng, long long lo, long long hi) {
  return std::uniform_int_distribution<long long>(lo, hi)(rng);
}

}  // namespace ordcover
