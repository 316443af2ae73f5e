#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace polartail {

using Rng = std::mt19937_64;

// SplitMix64 finaliser; used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic seed for substream `index` of `base`. Distinct tags keep
// pilot runs, cells and workers on non-overlapping streams.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index,
                                    std::uint64_t tag = 0) {
  return mix64(mix64(base ^ mix64(tag)) + index);
}

inline Rng make_rng(std::uint64_t base, std::uint64_t index,
                    std::uint64_t tag = 0) {
  return Rng(derive_seed(base, index, tag));
}

// Uniform on the open interval (0,1): 53 random bits, offset by half an ulp.
inline double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double standard_exponential(Rng& rng) { return -std::log(uniform_open(rng)); }

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>{}(rng);
}

}  // namespace polartail
