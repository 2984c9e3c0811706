#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <string_view>
#include <variant>

#include "wzone/channel.hpp"
#include "wzone/encoding.hpp"
#include "wzone/zone.hpp"

namespace wzone {

enum class Modality : std::uint8_t { rf_fingerprint = 0, visual = 1, audio = 2, imu = 3, beacon = 4 };

inline std::string_view modality_name(Modality m) {
  switch (m) {
    case Modality::rf_fingerprint: return "rf_fingerprint";
    case Modality::visual: return "visual";
    case Modality::audio: return "audio";
    case Modality::imu: return "imu";
    case Modality::beacon: return "beacon";
  }
  return "unknown";
}

using FeatureValue = std::variant<bool, double>;

/// One witness-local feature (f_j^(m)) with its quality and freshness.
struct FeatureDescriptor {
  Modality modality = Modality::rf_fingerprint;
  FeatureValue value = 0.0;
  double quality = 1.0;    // [0, 1]
  double freshness = 0.0;  // seconds since sampling
  std::string witness_id;

  friend bool operator==(const FeatureDescriptor&, const FeatureDescriptor&) = default;

  [[nodiscard]] double as_number() const {
    return std::visit([](auto v) { return static_cast<double>(v); }, value);
  }
};

inline void encode_fields(Encoder& e, const FeatureDescriptor& f) {
  e.u64(static_cast<std::uint64_t>(f.modality));
  if (const bool* b = std::get_if<bool>(&f.value)) {
    e.u64(0).boolean(*b);
  } else {
    e.u64(1).real(std::get<double>(f.value));
  }
  e.real(f.quality).real(f.freshness).str(f.witness_id);
}

inline void decode_fields(Decoder& d, FeatureDescriptor& f) {
  const auto m = d.u64();
  if (m > static_cast<std::uint64_t>(Modality::beacon)) throw DecodeError("unknown modality");
  f.modality = static_cast<Modality>(m);
  const auto tag = d.u64();
  if (tag == 0) {
    f.value = d.boolean();
  } else if (tag == 1) {
    f.value = d.real();
  } else {
    throw DecodeError("unknown feature value tag");
  }
  f.quality = d.real();
  f.freshness = d.real();
  f.witness_id = d.str();
}

struct Scene {
  std::set<std::string> objects;

  [[nodiscard]] bool contains(const std::string& label) const { return objects.contains(label); }
};

/// Full-scale path-loss mismatch of the RF similarity map, in dB.
inline constexpr double kRfFullScaleDb = 30.0;

/// Linear similarity: 1 at a perfect match, 0 at >= 30 dB mismatch.
inline double rf_similarity(double observed_pl, double expected_pl) {
  return std::max(0.0, 1.0 - std::abs(observed_pl - expected_pl) / kRfFullScaleDb);
}

/// RSSI fingerprint check. The observation follows the prover's true
/// position; the expectation is computed from where the prover claims to be.
inline FeatureDescriptor sample_rf_feature(const WitnessIdentity& witness, const Vector3& prover_true,
                                           const Vector3& prover_claimed, const ChannelParams& params,
                                           RandomStream& rng) {
  const double observed = sample_path_loss(distance(witness.position, prover_true), params, rng);
  const double expected = deterministic_path_loss(distance(witness.position, prover_claimed), params);
  FeatureDescriptor f;
  f.modality = Modality::rf_fingerprint;
  f.value = rf_similarity(observed, expected);
  f.witness_id = witness.witness_id;
  return f;
}

/// Semantic scene query. Present objects are detected with probability
/// p_det; absent objects are never reported. One uniform is always consumed
/// so the stream stays aligned whether or not the object is present.
inline bool visual_detect(const Scene& scene, const std::string& query, double p_det, RandomStream& rng) {
  const double u = rng.uniform();
  return scene.contains(query) && u < p_det;
}

inline FeatureDescriptor visual_feature(const std::string& witness_id, bool detected) {
  FeatureDescriptor f;
  f.modality = Modality::visual;
  f.value = detected;
  f.witness_id = witness_id;
  return f;
}

// Audio, IMU, and beacon sensors are pass-through: they always report a
// satisfied observation.
inline FeatureDescriptor pass_through_feature(const std::string& witness_id, Modality m,
                                              double beacon_count = 0.0) {
  FeatureDescriptor f;
  f.modality = m;
  f.witness_id = witness_id;
  if (m == Modality::beacon) {
    f.value = beacon_count;
  } else {
    f.value = true;
  }
  return f;
}

}  // namespace wzone
