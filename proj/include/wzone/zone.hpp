#pragma once

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "wzone/channel.hpp"
#include "wzone/crypto.hpp"
#include "wzone/geometry.hpp"

namespace wzone {

/// Geometry, quorum, timing, and channel parameters of one witnessing zone.
struct ZoneConfig {
  std::string zone_id = "Z-1";
  Vector3 center{};
  double radius = 20.0;
  int witness_count = 4;
  int quorum_k = 3;
  double interval_seconds = 2.0;
  double claim_period_seconds = 2.0;
  double run_seconds = 60.0;
  std::vector<Vector3> witness_positions = witness_layout(4);
  ChannelParams channel{};
  double d_max = 20.0;   // noise-free acceptance distance
  double d_acc = 21.24;  // acceptance distance applied to noisy bounds

  /// Number of claims a run issues (one per claim period).
  [[nodiscard]] int claim_count() const {
    return static_cast<int>(std::llround(run_seconds / claim_period_seconds));
  }

  void validate() const {
    if (zone_id.empty()) throw ConfigError("zone.zone_id must be non-empty");
    if (!center.finite()) throw ConfigError("zone.center must be finite");
    if (!(radius > 0.0)) throw ConfigError("zone.radius must be > 0");
    if (witness_count < 1) throw ConfigError("zone.witness_count must be positive");
    if (quorum_k < 1) throw ConfigError("zone.quorum_k must be positive");
    if (quorum_k > witness_count)
      throw ConfigError("zone.quorum_k (" + std::to_string(quorum_k) +
                        ") exceeds witness_count (" + std::to_string(witness_count) + ")");
    if (static_cast<int>(witness_positions.size()) != witness_count)
      throw ConfigError("zone.witness_positions length differs from witness_count");
    for (const auto& p : witness_positions)
      if (!p.finite()) throw ConfigError("zone.witness_positions must be finite");
    if (!(interval_seconds > 0.0)) throw ConfigError("zone.interval must be > 0");
    if (!(claim_period_seconds > 0.0)) throw ConfigError("zone.claim_period must be > 0");
    if (!(run_seconds > 0.0)) throw ConfigError("zone.run_duration must be > 0");
    const double ratio = run_seconds / claim_period_seconds;
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
      throw ConfigError("zone.run_duration must be a whole number of claim periods");
    if (!(d_max > 0.0)) throw ConfigError("zone.d_max must be > 0");
    if (!(d_acc >= d_max)) throw ConfigError("zone.d_acc must be >= d_max");
    channel.validate();
  }
};

struct WitnessIdentity {
  std::string witness_id;
  PublicKey public_key{};
  Vector3 position{};
};

/// Public keys and accepted policy versions of one zone, as a verifier sees
/// them.
struct ZoneRegistry {
  std::string zone_id;
  int quorum_k = 3;
  std::vector<WitnessIdentity> witnesses;
  std::set<std::string> policies;

  [[nodiscard]] const WitnessIdentity* find(const std::string& witness_id) const {
    for (const auto& w : witnesses)
      if (w.witness_id == witness_id) return &w;
    return nullptr;
  }
};

}  // namespace wzone
