#pragma once

// Protocol property checks shared by the unit tests and the acceptance
// binary. Each returns a pass flag plus a one-line account of what ran.

#include <algorithm>
#include <string>
#include <vector>

#include "wzone/wzone.hpp"

namespace wzone::testing {

struct PropertyResult {
  bool ok = true;
  std::string detail;
};

/// A baseline zone with keys, one admitted interval, and its block log.
struct ProtocolFixture {
  ScenarioConfig cfg;
  std::vector<WitnessNode> nodes;
  ZoneRegistry registry;
  std::vector<Block> chain;
  IntervalOutcome outcome;  // interval 1

  explicit ProtocolFixture(std::string_view scenario = "baseline_4w", std::uint64_t seed = 1) {
    cfg = build_scenario(scenario);
    cfg.seed = seed;
    nodes = make_witness_nodes(cfg);
    registry = make_registry(cfg, nodes);
    append_block(chain, cfg.zone.zone_id, 0, {});
    outcome = round(1, seed);
  }

  [[nodiscard]] Claim claim(std::uint64_t interval) const {
    return Claim::make(interval, cfg.zone.zone_id, cfg.prover_claimed_pos, cfg.payload);
  }

  [[nodiscard]] Environment environment() const {
    Environment env;
    env.prover_true_position = cfg.prover_true_pos;
    env.scene = cfg.scene;
    env.p_det = cfg.p_det;
    env.prover_timing = cfg.prover_timing;
    return env;
  }

  IntervalOutcome round(std::uint64_t interval, std::uint64_t seed) {
    RandomStream rng(seed);
    return quorum_round(nodes, registry, claim(interval), cfg.zone, cfg.policy, environment(), chain, rng);
  }

  /// Signed attestation from witness i over an arbitrary root.
  [[nodiscard]] Attestation attest(std::size_t i, const Claim& c, const Digest& block_ref,
                                   const std::string& policy_id) const {
    Digest root = c.claim_id;
    root[0] ^= static_cast<std::uint8_t>(i + 1);
    return sign_attestation(nodes[i].secret_key, nodes[i].identity.witness_id, c.interval_index, block_ref, c.claim_id,
                            root, policy_id, cfg.zone.zone_id);
  }
};

/// Random attestation multisets: assembly succeeds exactly when at least k
/// distinct witnesses attest to this claim, interval, block, and policy.
inline PropertyResult quorum_soundness(int trials, std::uint64_t seed = 2024) {
  ProtocolFixture fx;
  const auto& zone = fx.cfg.zone;
  const Claim c = fx.claim(2);
  const Claim next = fx.claim(3);
  const Digest ref = fx.chain.back().digest;
  const std::string pid = fx.cfg.policy.policy_id;
  Digest other_ref = ref;
  other_ref[5] ^= 0x40;

  struct Entry {
    Attestation a;
    bool counts;
  };
  std::vector<Entry> pool;
  for (std::size_t i = 0; i < fx.nodes.size(); ++i) {
    pool.push_back({fx.attest(i, c, ref, pid), true});
    pool.push_back({fx.attest(i, next, ref, pid), false});       // other interval
    pool.push_back({fx.attest(i, c, other_ref, pid), false});    // other block
    pool.push_back({fx.attest(i, c, ref, "media_v2"), false});   // other policy
    Attestation relabeled = fx.attest(i, next, ref, pid);        // interval field rewritten
    relabeled.interval_index = c.interval_index;
    pool.push_back({relabeled, false});
  }

  RandomStream rng(seed);
  int below = 0, above = 0;
  for (int t = 0; t < trials; ++t) {
    const std::size_t size = rng.next_u64() % 9;
    std::vector<Attestation> set;
    std::vector<std::string> distinct;
    for (std::size_t s = 0; s < size; ++s) {
      const Entry& e = pool[rng.next_u64() % pool.size()];
      set.push_back(e.a);
      if (e.counts && std::find(distinct.begin(), distinct.end(), e.a.witness_id) == distinct.end())
        distinct.push_back(e.a.witness_id);
    }
    const bool expect = static_cast<int>(distinct.size()) >= zone.quorum_k;
    bool built = false;
    std::size_t roots = 0;
    try {
      roots = assemble_evidence(set, zone, c, pid, ref).witness_roots.size();
      built = true;
    } catch (const AssemblyError&) {
    }
    if (built != expect || (built && roots != distinct.size()))
      return {false, "trial " + std::to_string(t) + ": " + std::to_string(distinct.size()) +
                         " distinct valid witnesses, assembly " + (built ? "succeeded" : "failed")};
    (expect ? above : below)++;
  }
  return {true, std::to_string(trials) + " multisets (" + std::to_string(below) + " below k, " +
                    std::to_string(above) + " at or above k), no evidence below k"};
}

/// Attestations from interval i, replayed (as-is or with the interval field
/// rewritten) into interval i+1, never contribute to its quorum.
inline PropertyResult interval_binding(int rounds = 20) {
  ProtocolFixture fx;
  int replays = 0;
  for (int r = 0; r < rounds; ++r) {
    const std::uint64_t i = fx.chain.back().interval_index + 1;
    const IntervalOutcome prev = fx.round(i, 100 + r);
    if (!prev.admitted) continue;
    const Claim next = fx.claim(i + 1);
    const Digest ref = fx.chain.back().digest;
    std::vector<Attestation> replay = prev.attestations;
    for (auto a : prev.attestations) {
      a.interval_index = i + 1;
      replay.push_back(a);
    }
    std::vector<Attestation> valid;
    for (const auto& a : replay)
      if (verify_attestation(a, fx.registry)) valid.push_back(a);
    try {
      assemble_evidence(valid, fx.cfg.zone, next, fx.cfg.policy.policy_id, ref);
      return {false, "replayed attestations from interval " + std::to_string(i) + " formed a quorum"};
    } catch (const AssemblyError&) {
    }
    // An old evidence object does not bind to a later block either.
    EvidenceObject moved = *prev.evidence;
    moved.block_ref = ref;
    if (verify_evidence(moved, fx.registry, fx.registry.policies, std::span<const Block>(fx.chain)).ok())
      return {false, "evidence from interval " + std::to_string(i) + " re-bound to a later block"};
    ++replays;
  }
  if (replays == 0) return {false, "no admitted interval to replay"};
  return {true, std::to_string(replays) + " replays into the next interval, none counted"};
}

struct FaultBoundary {
  PropertyResult result;
  int one_colluder_admitted = 0;   // over every single-colluder placement
  int two_colluders_min_admitted = 0;
  int runs = 0;
};

/// Distance-fraud claim with colluding witnesses. One colluder (any
/// position) never yields a quorum; two colluders away from the prover's
/// near witness do on almost every run.
inline FaultBoundary fault_boundary(int runs = 100) {
  FaultBoundary fb;
  fb.runs = runs;
  auto admitted_with = [&](std::vector<std::size_t> colluders) {
    ScenarioConfig cfg = build_scenario("distance_fraud");
    for (auto i : colluders) cfg.witness_behaviors[i] = WitnessBehavior::colluder;
    const auto nodes = make_witness_nodes(cfg);
    const auto registry = make_registry(cfg, nodes);
    Environment env;
    env.prover_true_position = cfg.prover_true_pos;
    int admitted = 0;
    for (int r = 0; r < runs; ++r) {
      std::vector<Block> chain;
      append_block(chain, cfg.zone.zone_id, 0, {});
      RandomStream rng(iteration_seed(7, static_cast<std::uint64_t>(r)));
      const Claim c = Claim::make(1, cfg.zone.zone_id, cfg.prover_claimed_pos, cfg.payload);
      const auto o = quorum_round(nodes, registry, c, cfg.zone, cfg.policy, env, chain, rng);
      if (o.admitted) {
        ++admitted;
        if (!verify_evidence(*o.evidence, registry, registry.policies, std::span<const Block>(chain)).ok()) return -1;
      }
    }
    return admitted;
  };
  for (std::size_t i = 0; i < 4; ++i) {
    const int a = admitted_with({i});
    if (a < 0) return {{false, "admitted evidence failed verification"}, 0, 0, runs};
    fb.one_colluder_admitted += a;
  }
  fb.two_colluders_min_admitted = runs;
  // W1 at (10,10) is the only honest witness in range of (13,13).
  for (auto pair : {std::vector<std::size_t>{1, 2}, {1, 3}, {2, 3}}) {
    const int a = admitted_with(pair);
    if (a < 0) return {{false, "admitted evidence failed verification"}, 0, 0, runs};
    fb.two_colluders_min_admitted = std::min(fb.two_colluders_min_admitted, a);
  }
  fb.result.ok = fb.one_colluder_admitted == 0 && fb.two_colluders_min_admitted * 100 >= 99 * runs;
  fb.result.detail = "1 colluder: " + std::to_string(fb.one_colluder_admitted) + " admitted over 4x" +
                     std::to_string(runs) + " runs; 2 colluders: min " +
                     std::to_string(fb.two_colluders_min_admitted) + "/" + std::to_string(runs) + " admitted";
  return fb;
}

/// Flips every bit of the serialized evidence file and the serialized block
/// log in turn; each flip must make decoding or verification fail.
inline PropertyResult tamper_matrix() {
  ProtocolFixture fx;
  for (int i = 0; i < 3; ++i) fx.round(fx.chain.back().interval_index + 1, 50 + i);
  if (!fx.outcome.admitted) return {false, "fixture interval not admitted"};
  const Bytes ev_file = serialize_evidence(*fx.outcome.evidence);
  const Bytes chain_file = serialize_chain(fx.chain);

  auto verifies = [&](const Bytes& ev_bytes, const Bytes& chain_bytes) {
    try {
      const EvidenceObject ev = deserialize_evidence(ev_bytes);
      const std::vector<Block> chain = deserialize_chain(chain_bytes);
      return verify_evidence(ev, fx.registry, fx.registry.policies, std::span<const Block>(chain)).ok();
    } catch (const std::exception&) {
      return false;
    }
  };
  if (!verifies(ev_file, chain_file)) return {false, "untampered evidence does not verify"};

  std::size_t flips = 0;
  for (std::size_t bit = 0; bit < ev_file.size() * 8; ++bit, ++flips) {
    Bytes t = ev_file;
    t[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    if (verifies(t, chain_file)) return {false, "evidence bit " + std::to_string(bit) + " flip still verifies"};
  }
  for (std::size_t bit = 0; bit < chain_file.size() * 8; ++bit, ++flips) {
    Bytes t = chain_file;
    t[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    if (verifies(ev_file, t)) return {false, "block log bit " + std::to_string(bit) + " flip still verifies"};
  }
  return {true, std::to_string(flips) + " single-bit flips (" + std::to_string(ev_file.size()) +
                    "-byte evidence, " + std::to_string(chain_file.size()) + "-byte block log), all rejected"};
}

/// Every opening of every tree with 1..max_leaves leaves verifies; any
/// altered leaf, sibling, or position fails.
inline PropertyResult merkle_openings(std::size_t max_leaves = 8) {
  std::size_t checks = 0;
  for (std::size_t n = 1; n <= max_leaves; ++n) {
    std::vector<Bytes> leaves;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string s = "leaf/" + std::to_string(n) + "/" + std::to_string(i);
      leaves.emplace_back(s.begin(), s.end());
    }
    const Digest root = merkle_root(leaves);
    for (std::size_t i = 0; i < n; ++i) {
      const MerkleProof proof = prove_leaf(leaves, i);
      ++checks;
      if (!verify_leaf(root, leaves[i], proof))
        return {false, "valid opening " + std::to_string(i) + " of " + std::to_string(n) + " rejected"};
      for (std::size_t bit = 0; bit < leaves[i].size() * 8; ++bit, ++checks) {
        Bytes bad = leaves[i];
        bad[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        if (verify_leaf(root, bad, proof)) return {false, "altered leaf accepted"};
      }
      for (std::size_t s = 0; s < proof.siblings.size(); ++s)
        for (std::size_t bit = 0; bit < 256; ++bit, ++checks) {
          MerkleProof bad = proof;
          bad.siblings[s][bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
          if (verify_leaf(root, leaves[i], bad)) return {false, "altered path accepted"};
        }
      for (std::size_t j = 0; j < n; ++j, ++checks) {
        if (j == i) continue;
        if (verify_leaf(root, leaves[j], proof)) return {false, "opening for a different leaf accepted"};
        MerkleProof moved = proof;
        moved.index = j;
        if (verify_leaf(root, leaves[i], moved)) return {false, "opening at a different position accepted"};
      }
    }
  }
  return {true, std::to_string(checks) + " openings and alterations over trees of 1.." +
                    std::to_string(max_leaves) + " leaves"};
}

}  // namespace wzone::testing
