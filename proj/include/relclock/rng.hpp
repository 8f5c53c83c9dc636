#pragma once

// Counter-based splittable random streams. Stream (seed, index) is a
// SplitMix64 sequence whose starting state is mixed from the seed and the
// stream index, so independent work items (shots, tomography settings,
// sweep points) draw from non-overlapping deterministic streams and results
// do not depend on any execution schedule. Outputs are pure 64-bit integer
// arithmetic, identical on every platform, and pinned by golden-value tests.

#include <cstdint>

namespace relclock::rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output mix (Steele, Lea, Flood).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t index)
      : state_(mix64(seed + kGamma * (index + 1))) {}

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix64(state_);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., n-1} by 128-bit multiply-shift.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

// Sub-seed for derived work items (per-point Monte Carlo runs, tomography
// datasets): the first output of the corresponding stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return Stream(seed, index).next_u64();
}

}  // namespace relclock::rng
