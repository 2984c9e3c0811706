#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>

namespace wzone {

// SplitMix64 finalizer, used to decorrelate derived seeds.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seeded random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Variates are produced here rather than through <random>
/// distributions, which are implementation-defined, so a given seed yields
/// the same values with every toolchain.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Normal variate (Box-Muller; the second value of each pair is cached).
  double normal(double mean, double sigma) {
    if (spare_) {
      const double z = *spare_;
      spare_.reset();
      return mean + sigma * z;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    return mean + sigma * r * std::cos(theta);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Independent child stream; consumes exactly one value of this stream.
  RandomStream split() { return RandomStream(engine_() ^ 0xD1B54A32D192ED03ULL); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Per-iteration seed for Monte Carlo runs: master seed + iteration index.
inline constexpr std::uint64_t iteration_seed(std::uint64_t master, std::uint64_t iteration) {
  return master + iteration;
}

}  // namespace wzone
