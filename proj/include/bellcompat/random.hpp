#pragma once

#include <cstdint>

namespace bellcompat {

/// Independent draw sequences within one trial.
enum class StreamRole : std::uint64_t {
  Table = 1,
  Hidden = 2,
  InstrumentA = 3,
  InstrumentB = 4,
  DetectA = 5,
  DetectB = 6,
  NoiseA = 7,
  NoiseB = 8,
  Drift = 9,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the k-th draw is a pure function of
/// (seed, trial, role, k), so trials can be evaluated in any order or on any
/// number of threads without changing a single value.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t trial, StreamRole role)
      : key_(mix64(mix64(mix64(seed) ^ trial) ^ static_cast<std::uint64_t>(role))) {}

  std::uint64_t next() { return mix64(key_ + 0x632be59bd9b4e019ULL * ++counter_); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on (lo, hi) excluding both endpoints.
  double open_uniform(double lo, double hi) {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return lo + (hi - lo) * u;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace bellcompat
