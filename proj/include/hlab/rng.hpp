#pragma once
#include <cstdint>
#include <random>

namespace hlab {

using Rng = std::mt19937_64;

// SplitMix64 finalizer, used to decorrelate seeds derived from small integers.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Rng seeded_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

// Independent stream for trial number `trial` of a seeded experiment.
inline Rng trial_rng(std::uint64_t seed, std::uint64_t trial) {
  return Rng(mix64(mix64(seed) ^ (trial + 1)));
}

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Inclusive range. Modulo bias is irrelevant for the ranges used here.
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace hlab
