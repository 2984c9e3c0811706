#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "wzone/geometry.hpp"
#include "wzone/random.hpp"

namespace wzone {

/// Log-distance path-loss channel and ranging noise parameters.
struct ChannelParams {
  double pl0 = 40.0;          // dB at d0
  double d0 = 1.0;            // m
  double gamma = 2.0;         // path-loss exponent, LOS
  double shadow_sigma = 3.0;  // dB
  int rounds = 32;            // distance-bounding exchanges
  double mp_sigma = 0.5;      // m, aggregate multipath ranging noise
  double dist_err_frac = 0.01;

  void validate() const {
    if (!(d0 > 0.0)) throw ConfigError("channel.d0 must be > 0");
    if (!(gamma > 0.0)) throw ConfigError("channel.gamma must be > 0");
    if (!(shadow_sigma >= 0.0)) throw ConfigError("channel.shadow_sigma must be >= 0");
    if (rounds < 1) throw ConfigError("channel.rounds must be >= 1");
    if (!(mp_sigma >= 0.0)) throw ConfigError("channel.mp_sigma must be >= 0");
    if (!(dist_err_frac >= 0.0 && dist_err_frac < 1.0))
      throw ConfigError("channel.dist_err_frac must be in [0, 1)");
    if (!std::isfinite(pl0)) throw ConfigError("channel.pl0 must be finite");
  }

  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

/// PL0 + 10*gamma*log10(d/d0); distances below d0 are clamped to d0.
inline double deterministic_path_loss(double d, const ChannelParams& p) {
  const double dd = std::max(d, p.d0);
  return p.pl0 + 10.0 * p.gamma * std::log10(dd / p.d0);
}

/// Path loss with one log-normal shadowing draw.
inline double sample_path_loss(double d, const ChannelParams& p, RandomStream& rng) {
  return deterministic_path_loss(d, p) + rng.normal(0.0, p.shadow_sigma);
}

/// Standard deviation of one ranging estimate at true distance d.
inline double ranging_sigma(double d, const ChannelParams& p) {
  const double prop = p.dist_err_frac * d;
  return std::sqrt(p.mp_sigma * p.mp_sigma + prop * prop);
}

struct RangingResult {
  std::string witness_id;
  double true_distance = 0.0;
  double estimate = 0.0;  // db_j
  int rounds_used = 0;
};

/// Prover-side timing behavior during distance bounding. A prover can only
/// delay its responses; it cannot answer before the challenge arrives.
struct ProverTiming {
  double processing_delay_ns = 0.0;
};

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

/// Distance bound from the rapid-bit exchange. The rounds are folded into a
/// single estimate whose noise is a 1% distance-proportional term plus the
/// aggregate multipath term.
inline RangingResult range_estimate(double true_d, const ChannelParams& p, RandomStream& rng,
                                    ProverTiming timing = {}) {
  const double e_dist = rng.normal(0.0, p.dist_err_frac * true_d);
  const double e_mp = rng.normal(0.0, p.mp_sigma);
  // Round-trip delay is charged to the distance at half the speed of light.
  const double delay_m = std::max(0.0, timing.processing_delay_ns) * 1e-9 * kSpeedOfLight / 2.0;
  RangingResult r;
  r.true_distance = true_d;
  r.estimate = std::max(0.0, true_d + delay_m + e_dist + e_mp);
  r.rounds_used = p.rounds;
  return r;
}

}  // namespace wzone
