#pragma once

#include <cstdint>
#include <random>

namespace classfair {

// All randomness in the library flows through these helpers so that results
// are bit-reproducible across platforms and thread counts:
//   - std::mt19937_64 has a fully specified output sequence;
//   - uniform_below uses rejection sampling instead of
//     std::uniform_int_distribution, whose mapping is implementation-defined;
//   - per-trial engines are seeded by trial_seed(master, index), so a trial's
//     outcome depends only on (master seed, trial index), never on scheduling.

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t trial_seed(uint64_t master_seed, uint64_t trial_index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(trial_index + 0x51ed270bULL));
}

using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t seed) { return Rng(seed); }

// Unbiased draw from [0, n). Precondition: n >= 1.
inline uint64_t uniform_below(Rng& rng, uint64_t n) {
  const uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Default master seed when a caller does not supply one. Fixed constant, never
// wall-clock time: runs are reproducible by default.
inline constexpr uint64_t kDefaultSeed = 0xC1A55FA1ULL;

}  // namespace classfair
