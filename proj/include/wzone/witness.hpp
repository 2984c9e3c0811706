#pragma once

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wzone/channel.hpp"
#include "wzone/claim.hpp"
#include "wzone/evidence.hpp"
#include "wzone/merkle.hpp"
#include "wzone/policy.hpp"
#include "wzone/random.hpp"
#include "wzone/sensing.hpp"
#include "wzone/zone.hpp"

namespace wzone {

enum class WitnessBehavior : std::uint8_t { honest = 0, offline = 1, colluder = 2, equivocator = 3 };

inline std::string_view behavior_name(WitnessBehavior b) {
  switch (b) {
    case WitnessBehavior::honest: return "honest";
    case WitnessBehavior::offline: return "offline";
    case WitnessBehavior::colluder: return "colluder";
    case WitnessBehavior::equivocator: return "equivocator";
  }
  return "unknown";
}

inline std::optional<WitnessBehavior> behavior_from_name(std::string_view s) {
  for (auto b : {WitnessBehavior::honest, WitnessBehavior::offline, WitnessBehavior::colluder,
                 WitnessBehavior::equivocator})
    if (behavior_name(b) == s) return b;
  return std::nullopt;
}

struct WitnessNode {
  WitnessIdentity identity;
  SecretKey secret_key{};
  WitnessBehavior behavior = WitnessBehavior::honest;
};

/// Ground truth the witnesses observe during one interval.
struct Environment {
  Vector3 prover_true_position{};
  Scene scene;
  double p_det = 0.982;
  ProverTiming prover_timing{};
};

/// One line of the audit run log.
struct WitnessLogRecord {
  std::uint64_t interval_index = 0;
  std::string witness_id;
  std::string decision;  // admit, reject, offline, collude, equivocate
  double estimate = 0.0;
  std::vector<FeatureDescriptor> features;

  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json f = nlohmann::json::object();
    for (const auto& d : features) {
      if (const bool* b = std::get_if<bool>(&d.value)) {
        f[std::string(modality_name(d.modality))] = *b;
      } else {
        f[std::string(modality_name(d.modality))] = std::get<double>(d.value);
      }
    }
    return {{"interval_index", interval_index},
            {"witness_id", witness_id},
            {"decision", decision},
            {"estimate", estimate},
            {"features", f}};
  }
};

struct StepResult {
  std::optional<Attestation> attestation;
  std::optional<Attestation> conflicting;  // equivocators only
  WitnessLogRecord log;
};

/// Leaves committed under R_j, in order: claim id, distance bound, each
/// feature descriptor, per-requirement outcomes, policy id.
inline std::vector<Bytes> commitment_leaves(const Claim& claim, const RangingResult& ranging,
                                            std::span<const FeatureDescriptor> features,
                                            const std::vector<RequirementOutcome>& outcomes,
                                            const std::string& policy_id) {
  std::vector<Bytes> leaves;
  leaves.push_back(Encoder{}.bytes(claim.claim_id).take());
  leaves.push_back(Encoder{}.real(ranging.estimate).take());
  for (const auto& f : features) leaves.push_back(canonical_encode(f));
  {
    Encoder e;
    encode_outcomes(e, outcomes);
    leaves.push_back(e.take());
  }
  leaves.push_back(Encoder{}.str(policy_id).take());
  return leaves;
}

/// Samples every modality the policy asks for.
inline std::vector<FeatureDescriptor> sense(const WitnessIdentity& w, const Claim& claim, const Policy& policy,
                                            const ZoneConfig& zone, const Environment& env, RandomStream& rng) {
  std::vector<FeatureDescriptor> out;
  for (const auto& r : policy.requirements) {
    switch (r.kind) {
      case RequirementKind::distance_bound:
        break;
      case RequirementKind::rf_similarity:
        out.push_back(sample_rf_feature(w, env.prover_true_position, claim.claimed_position, zone.channel, rng));
        break;
      case RequirementKind::visual_similarity: {
        const std::string query = r.query.empty() ? claim.payload_text() : r.query;
        out.push_back(visual_feature(w.witness_id, visual_detect(env.scene, query, env.p_det, rng)));
        break;
      }
      case RequirementKind::audio_hash_match:
        out.push_back(pass_through_feature(w.witness_id, Modality::audio));
        break;
      case RequirementKind::imu_pattern:
        out.push_back(pass_through_feature(w.witness_id, Modality::imu));
        break;
      case RequirementKind::beacon_overlap:
        out.push_back(pass_through_feature(w.witness_id, Modality::beacon, r.threshold));
        break;
    }
  }
  return out;
}

inline Claim conflicting_claim(const Claim& claim) {
  Claim c = claim;
  static constexpr std::string_view kTag = "#conflict";
  c.payload.insert(c.payload.end(), kTag.begin(), kTag.end());
  c.claim_id = c.compute_id();
  return c;
}

/// Witness machine for one claim in one interval: distance bound, sensing,
/// Admit_v, and on admission a Merkle commitment and signature.
inline StepResult witness_step(const WitnessNode& node, const Claim& claim, const Policy& policy,
                               const ZoneConfig& zone, const Environment& env, const Digest& block_ref,
                               RandomStream& rng) {
  StepResult out;
  const auto& id = node.identity;
  out.log.interval_index = claim.interval_index;
  out.log.witness_id = id.witness_id;
  if (node.behavior == WitnessBehavior::offline) {
    out.log.decision = "offline";
    return out;
  }

  // Ranging and sensing always follow the prover's true position.
  RangingResult ranging =
      range_estimate(distance(id.position, env.prover_true_position), zone.channel, rng, env.prover_timing);
  ranging.witness_id = id.witness_id;
  std::vector<FeatureDescriptor> features = sense(id, claim, policy, zone, env, rng);
  const AdmitDecision decision = evaluate_admit(policy, claim, ranging, features, DistanceGate::for_zone(zone));
  out.log.estimate = ranging.estimate;
  out.log.features = features;

  auto sign_for = [&](const Claim& c, const std::vector<RequirementOutcome>& outcomes) {
    const Digest root = merkle_root(commitment_leaves(c, ranging, features, outcomes, policy.policy_id));
    return sign_attestation(node.secret_key, id.witness_id, c.interval_index, block_ref, c.claim_id, root,
                            policy.policy_id, zone.zone_id);
  };

  switch (node.behavior) {
    case WitnessBehavior::honest:
      out.log.decision = decision.admitted ? "admit" : "reject";
      if (decision.admitted) out.attestation = sign_for(claim, decision.per_requirement);
      break;
    case WitnessBehavior::colluder: {
      // Signs an admit regardless of what it measured.
      std::vector<RequirementOutcome> forged = decision.per_requirement;
      for (auto& o : forged) o.satisfied = true;
      out.log.decision = "collude";
      out.attestation = sign_for(claim, forged);
      break;
    }
    case WitnessBehavior::equivocator: {
      std::vector<RequirementOutcome> forged = decision.per_requirement;
      for (auto& o : forged) o.satisfied = true;
      out.log.decision = "equivocate";
      out.attestation = sign_for(claim, forged);
      out.conflicting = sign_for(conflicting_claim(claim), forged);
      break;
    }
    case WitnessBehavior::offline:
      break;
  }
  return out;
}

struct IntervalOutcome {
  std::uint64_t interval_index = 0;
  std::vector<Attestation> attestations;  // everything broadcast, conflicting ones included
  bool admitted = false;
  std::optional<EvidenceObject> evidence;
  Block block;
  std::vector<WitnessLogRecord> log;
};

inline void encode_fields(Encoder& e, const IntervalOutcome& o) {
  e.u64(o.interval_index);
  e.sequence(o.attestations, [](Encoder& n, const Attestation& a) { encode_fields(n, a); });
  e.boolean(o.admitted);
  e.boolean(o.evidence.has_value());
  if (o.evidence) e.nested([&](Encoder& n) { encode_fields(n, *o.evidence); });
  e.nested([&](Encoder& n) { encode_fields(n, o.block); });
}

inline void decode_fields(Decoder& d, IntervalOutcome& o) {
  o.interval_index = d.u64();
  o.attestations.clear();
  d.sequence([&](Decoder& n) {
    Attestation a;
    decode_fields(n, a);
    o.attestations.push_back(std::move(a));
  });
  o.admitted = d.boolean();
  if (d.boolean()) {
    EvidenceObject ev;
    d.nested([&](Decoder& n) { decode_fields(n, ev); });
    o.evidence = std::move(ev);
  } else {
    o.evidence.reset();
  }
  d.nested([&](Decoder& n) { decode_fields(n, o.block); });
}

inline ZoneRegistry make_registry(const ZoneConfig& zone, std::span<const WitnessNode> nodes,
                                  std::set<std::string> policies) {
  ZoneRegistry r;
  r.zone_id = zone.zone_id;
  r.quorum_k = zone.quorum_k;
  for (const auto& n : nodes) r.witnesses.push_back(n.identity);
  r.policies = std::move(policies);
  return r;
}

/// One interval: every witness steps on the claim, signatures are verified,
/// the quorum tally runs, and the interval's block is appended to `chain`.
/// `chain` must already hold the block finalized before this interval.
inline IntervalOutcome quorum_round(std::span<const WitnessNode> nodes, const ZoneRegistry& registry,
                                    const Claim& claim, const ZoneConfig& zone, const Policy& policy,
                                    const Environment& env, std::vector<Block>& chain, RandomStream& rng) {
  if (chain.empty()) throw ChainError("quorum round needs a finalized previous block");
  IntervalOutcome out;
  out.interval_index = claim.interval_index;
  const Digest block_ref = chain.back().digest;

  std::vector<Attestation> valid;
  for (const auto& node : nodes) {
    RandomStream witness_rng = rng.split();
    StepResult step = witness_step(node, claim, policy, zone, env, block_ref, witness_rng);
    out.log.push_back(std::move(step.log));
    for (auto* a : {&step.attestation, &step.conflicting}) {
      if (!*a) continue;
      if (verify_attestation(**a, registry)) valid.push_back(**a);
      out.attestations.push_back(std::move(**a));
    }
  }

  try {
    out.evidence = assemble_evidence(valid, zone, claim, policy.policy_id, block_ref);
    out.admitted = true;
  } catch (const AssemblyError&) {
    out.admitted = false;
  }

  std::vector<Digest> admitted_ids;
  if (out.admitted) admitted_ids.push_back(claim.claim_id);
  out.block = append_block(chain, zone.zone_id, claim.interval_index, std::move(admitted_ids));
  return out;
}

}  // namespace wzone
