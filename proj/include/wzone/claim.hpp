#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wzone/crypto.hpp"
#include "wzone/encoding.hpp"
#include "wzone/geometry.hpp"
#include "wzone/sensing.hpp"

namespace wzone {

inline void encode_vector3(Encoder& e, const Vector3& v) {
  e.nested([&](Encoder& n) { n.real(v.x).real(v.y).real(v.z); });
}

inline Vector3 decode_vector3(Decoder& d) {
  Vector3 v;
  d.nested([&](Decoder& n) {
    v.x = n.real();
    v.y = n.real();
    v.z = n.real();
  });
  return v;
}

/// Prover's per-interval context-bearing claim. claim_id is the digest of
/// the remaining fields.
struct Claim {
  Digest claim_id{};
  std::uint64_t interval_index = 0;
  std::string zone_id;
  Vector3 claimed_position{};
  std::vector<FeatureDescriptor> disclosed_features;
  Bytes payload;

  friend bool operator==(const Claim&, const Claim&) = default;

  [[nodiscard]] Digest compute_id() const {
    Encoder e;
    e.str("wzone/claim/v1").u64(interval_index).str(zone_id);
    encode_vector3(e, claimed_position);
    e.sequence(disclosed_features, [](Encoder& n, const FeatureDescriptor& f) { encode_fields(n, f); });
    e.bytes(payload);
    return sha256(e.data());
  }

  [[nodiscard]] std::string payload_text() const { return std::string(payload.begin(), payload.end()); }

  static Claim make(std::uint64_t interval_index, std::string zone_id, Vector3 claimed_position,
                    std::string_view payload, std::vector<FeatureDescriptor> disclosed = {}) {
    Claim c;
    c.interval_index = interval_index;
    c.zone_id = std::move(zone_id);
    c.claimed_position = claimed_position;
    c.disclosed_features = std::move(disclosed);
    c.payload.assign(payload.begin(), payload.end());
    c.claim_id = c.compute_id();
    return c;
  }
};

inline void encode_fields(Encoder& e, const Claim& c) {
  e.bytes(c.claim_id).u64(c.interval_index).str(c.zone_id);
  encode_vector3(e, c.claimed_position);
  e.sequence(c.disclosed_features, [](Encoder& n, const FeatureDescriptor& f) { encode_fields(n, f); });
  e.bytes(c.payload);
}

inline void decode_fields(Decoder& d, Claim& c) {
  c.claim_id = d.digest();
  c.interval_index = d.u64();
  c.zone_id = d.str();
  c.claimed_position = decode_vector3(d);
  c.disclosed_features.clear();
  d.sequence([&](Decoder& n) {
    FeatureDescriptor f;
    decode_fields(n, f);
    c.disclosed_features.push_back(std::move(f));
  });
  c.payload = d.bytes();
}

}  // namespace wzone
