#pragma once

#include <cstdint>
#include <random>

namespace kmxx {

using Mt = std::mt19937_64;

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Per-trial seed derivation: documented in the project README so external
// tooling can replay individual trials.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ (kGolden * (index + 1)));
}

// Canonical 53-bit uniform in [0, 1). Bit-portable across standard library
// implementations (std::uniform_real_distribution is not).
inline double uniform01(Mt& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace kmxx
