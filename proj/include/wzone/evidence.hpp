#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wzone/claim.hpp"
#include "wzone/crypto.hpp"
#include "wzone/encoding.hpp"
#include "wzone/zone.hpp"

namespace wzone {

// ---------------------------------------------------------------------------
// Attestations

/// One witness's signed commitment to admitting a claim in an interval.
struct Attestation {
  std::string witness_id;
  std::uint64_t interval_index = 0;
  Digest block_ref{};  // digest of the last finalized block
  Digest claim_id{};
  Digest merkle_root{};  // R_j
  std::string policy_id;
  std::string zone_id;
  Bytes signature;

  friend bool operator==(const Attestation&, const Attestation&) = default;
};

inline void encode_fields(Encoder& e, const Attestation& a) {
  e.str(a.witness_id).u64(a.interval_index).bytes(a.block_ref).bytes(a.claim_id).bytes(a.merkle_root);
  e.str(a.policy_id).str(a.zone_id).bytes(a.signature);
}

inline void decode_fields(Decoder& d, Attestation& a) {
  a.witness_id = d.str();
  a.interval_index = d.u64();
  a.block_ref = d.digest();
  a.claim_id = d.digest();
  a.merkle_root = d.digest();
  a.policy_id = d.str();
  a.zone_id = d.str();
  a.signature = d.bytes();
}

/// Bytes covered by sig_j = Sign_j(b, c, R_j, v, Z_z).
inline Bytes attestation_message(const Digest& block_ref, const Digest& claim_id, const Digest& merkle_root,
                                 std::string_view policy_id, std::string_view zone_id) {
  Encoder e;
  e.str("wzone/attestation/v1").bytes(block_ref).bytes(claim_id).bytes(merkle_root).str(policy_id).str(zone_id);
  return e.take();
}

inline Attestation sign_attestation(const SecretKey& sk, std::string witness_id, std::uint64_t interval_index,
                                    const Digest& block_ref, const Digest& claim_id, const Digest& merkle_root,
                                    std::string policy_id, std::string zone_id) {
  Attestation a;
  a.witness_id = std::move(witness_id);
  a.interval_index = interval_index;
  a.block_ref = block_ref;
  a.claim_id = claim_id;
  a.merkle_root = merkle_root;
  a.policy_id = std::move(policy_id);
  a.zone_id = std::move(zone_id);
  a.signature = sign_message(sk, attestation_message(block_ref, claim_id, merkle_root, a.policy_id, a.zone_id));
  return a;
}

enum class AttestationCheck { valid, unknown_witness, malformed_signature, bad_signature };

inline AttestationCheck check_attestation(const Attestation& a, const ZoneRegistry& registry) {
  const WitnessIdentity* w = registry.find(a.witness_id);
  if (!w) return AttestationCheck::unknown_witness;
  if (a.signature.size() != kSignatureBytes) return AttestationCheck::malformed_signature;
  const Bytes msg = attestation_message(a.block_ref, a.claim_id, a.merkle_root, a.policy_id, a.zone_id);
  return verify_message(w->public_key, msg, a.signature) ? AttestationCheck::valid : AttestationCheck::bad_signature;
}

inline bool verify_attestation(const Attestation& a, const ZoneRegistry& registry) {
  return check_attestation(a, registry) == AttestationCheck::valid;
}

// ---------------------------------------------------------------------------
// Evidence objects

/// One member of the quorum signature. The quorum signature is the set of
/// individual signatures; verifiers go through verify_quorum_signature only.
struct QuorumSignature {
  std::string witness_id;
  Bytes signature;

  friend bool operator==(const QuorumSignature&, const QuorumSignature&) = default;
};

/// E(c) = <b, c, {R_j}, sigma_Q, v, Z_z>.
struct EvidenceObject {
  Digest block_ref{};
  Claim claim;
  std::map<std::string, Digest> witness_roots;
  std::vector<QuorumSignature> quorum_signatures;
  std::string policy_id;
  std::string zone_id;

  friend bool operator==(const EvidenceObject&, const EvidenceObject&) = default;
};

inline void encode_fields(Encoder& e, const EvidenceObject& ev) {
  e.bytes(ev.block_ref);
  e.nested([&](Encoder& n) { encode_fields(n, ev.claim); });
  e.sequence(ev.witness_roots, [](Encoder& n, const auto& kv) { n.str(kv.first).bytes(kv.second); });
  e.sequence(ev.quorum_signatures, [](Encoder& n, const QuorumSignature& s) { n.str(s.witness_id).bytes(s.signature); });
  e.str(ev.policy_id).str(ev.zone_id);
}

inline void decode_fields(Decoder& d, EvidenceObject& ev) {
  ev.block_ref = d.digest();
  d.nested([&](Decoder& n) { decode_fields(n, ev.claim); });
  ev.witness_roots.clear();
  d.sequence([&](Decoder& n) {
    std::string id = n.str();
    Digest root = n.digest();
    if (!ev.witness_roots.emplace(std::move(id), root).second) throw DecodeError("duplicate witness root");
  });
  ev.quorum_signatures.clear();
  d.sequence([&](Decoder& n) {
    QuorumSignature s;
    s.witness_id = n.str();
    s.signature = n.bytes();
    ev.quorum_signatures.push_back(std::move(s));
  });
  ev.policy_id = d.str();
  ev.zone_id = d.str();
}

enum class AssemblyErrorCode { insufficient_quorum };

class AssemblyError : public std::runtime_error {
 public:
  AssemblyError(AssemblyErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  [[nodiscard]] AssemblyErrorCode code() const { return code_; }

 private:
  AssemblyErrorCode code_;
};

/// Builds the evidence object from already verified attestations. Only
/// attestations bound to this claim's interval, claim id, policy, zone, and
/// block reference are composable; each witness counts once.
inline EvidenceObject assemble_evidence(std::span<const Attestation> attestations, const ZoneConfig& zone,
                                        const Claim& claim, const std::string& policy_id, const Digest& block_ref) {
  EvidenceObject ev;
  ev.block_ref = block_ref;
  ev.claim = claim;
  ev.policy_id = policy_id;
  ev.zone_id = zone.zone_id;
  int off_interval = 0;
  for (const auto& a : attestations) {
    if (a.interval_index != claim.interval_index) {
      ++off_interval;
      continue;
    }
    if (a.claim_id != claim.claim_id || a.policy_id != policy_id || a.zone_id != zone.zone_id ||
        a.block_ref != block_ref)
      continue;
    if (ev.witness_roots.contains(a.witness_id)) continue;
    ev.witness_roots.emplace(a.witness_id, a.merkle_root);
    ev.quorum_signatures.push_back({a.witness_id, a.signature});
  }
  const int have = static_cast<int>(ev.witness_roots.size());
  if (have < zone.quorum_k) {
    std::string msg = "insufficient quorum: " + std::to_string(have) + " of " + std::to_string(zone.quorum_k) +
                      " distinct witnesses";
    if (off_interval > 0) msg += " (" + std::to_string(off_interval) + " attestation(s) from another interval)";
    throw AssemblyError(AssemblyErrorCode::insufficient_quorum, msg);
  }
  return ev;
}

// ---------------------------------------------------------------------------
// Block log

struct Block {
  std::uint64_t interval_index = 0;
  Digest prev_digest{};
  std::vector<Digest> admitted_claim_ids;  // sorted
  std::string zone_id;
  Digest digest{};

  friend bool operator==(const Block&, const Block&) = default;
};

inline Digest compute_block_digest(const Digest& prev, std::uint64_t interval_index, std::string_view zone_id,
                                   std::span<const Digest> claim_ids) {
  Encoder e;
  e.str("wzone/block/v1").bytes(prev).u64(interval_index).str(zone_id);
  e.sequence(claim_ids, [](Encoder& n, const Digest& id) { n.bytes(id); });
  return sha256(e.data());
}

inline void encode_fields(Encoder& e, const Block& b) {
  e.u64(b.interval_index).bytes(b.prev_digest);
  e.sequence(b.admitted_claim_ids, [](Encoder& n, const Digest& id) { n.bytes(id); });
  e.str(b.zone_id).bytes(b.digest);
}

inline void decode_fields(Decoder& d, Block& b) {
  b.interval_index = d.u64();
  b.prev_digest = d.digest();
  b.admitted_claim_ids.clear();
  d.sequence([&](Decoder& n) { b.admitted_claim_ids.push_back(n.digest()); });
  b.zone_id = d.str();
  b.digest = d.digest();
}

class ChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Appends the block for `interval_index`. An empty chain takes the genesis
/// block (interval 0, zero previous digest); afterwards indices must be
/// contiguous.
inline const Block& append_block(std::vector<Block>& chain, const std::string& zone_id, std::uint64_t interval_index,
                                 std::vector<Digest> admitted_claim_ids) {
  Block b;
  if (chain.empty()) {
    if (interval_index != 0) throw ChainError("genesis block must have interval index 0");
    b.prev_digest = kZeroDigest;
  } else {
    if (interval_index != chain.back().interval_index + 1)
      throw ChainError("non-contiguous interval " + std::to_string(interval_index) + " after " +
                       std::to_string(chain.back().interval_index));
    if (chain.back().zone_id != zone_id) throw ChainError("zone mismatch in chain");
    b.prev_digest = chain.back().digest;
  }
  std::sort(admitted_claim_ids.begin(), admitted_claim_ids.end());
  admitted_claim_ids.erase(std::unique(admitted_claim_ids.begin(), admitted_claim_ids.end()),
                           admitted_claim_ids.end());
  b.interval_index = interval_index;
  b.zone_id = zone_id;
  b.admitted_claim_ids = std::move(admitted_claim_ids);
  b.digest = compute_block_digest(b.prev_digest, b.interval_index, b.zone_id, b.admitted_claim_ids);
  chain.push_back(std::move(b));
  return chain.back();
}

/// Recomputes every digest and link; checks contiguous indices from 0.
inline bool verify_chain(std::span<const Block> blocks) {
  Digest prev = kZeroDigest;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    if (b.interval_index != i) return false;
    if (b.prev_digest != prev) return false;
    if (i > 0 && b.zone_id != blocks[0].zone_id) return false;
    if (!std::is_sorted(b.admitted_claim_ids.begin(), b.admitted_claim_ids.end())) return false;
    if (std::adjacent_find(b.admitted_claim_ids.begin(), b.admitted_claim_ids.end()) != b.admitted_claim_ids.end())
      return false;
    if (compute_block_digest(b.prev_digest, b.interval_index, b.zone_id, b.admitted_claim_ids) != b.digest)
      return false;
    prev = b.digest;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Verification

enum class VerdictCode {
  pass,
  unknown_zone,
  unknown_policy,
  insufficient_quorum,
  signature_failure,
  block_binding_mismatch,
};

inline std::string_view verdict_name(VerdictCode c) {
  switch (c) {
    case VerdictCode::pass: return "pass";
    case VerdictCode::unknown_zone: return "unknown zone";
    case VerdictCode::unknown_policy: return "unknown policy version";
    case VerdictCode::insufficient_quorum: return "insufficient quorum";
    case VerdictCode::signature_failure: return "signature failure";
    case VerdictCode::block_binding_mismatch: return "block-binding mismatch";
  }
  return "unknown";
}

struct Verdict {
  VerdictCode code = VerdictCode::pass;
  std::string detail;

  [[nodiscard]] bool ok() const { return code == VerdictCode::pass; }
};

/// Checks sigma_Q: every listed root carries a valid signature from a
/// registered witness over (b, c, R_j, v, Z_z), and at least k distinct
/// witnesses signed.
inline Verdict verify_quorum_signature(const EvidenceObject& ev, const ZoneRegistry& registry) {
  if (ev.claim.compute_id() != ev.claim.claim_id)
    return {VerdictCode::signature_failure, "claim id does not match claim contents"};
  std::set<std::string> signers;
  for (const auto& s : ev.quorum_signatures) {
    auto root = ev.witness_roots.find(s.witness_id);
    if (root == ev.witness_roots.end())
      return {VerdictCode::signature_failure, "signature from " + s.witness_id + " without a committed root"};
    const WitnessIdentity* w = registry.find(s.witness_id);
    if (!w) return {VerdictCode::signature_failure, "unknown witness " + s.witness_id};
    const Bytes msg = attestation_message(ev.block_ref, ev.claim.claim_id, root->second, ev.policy_id, ev.zone_id);
    if (!verify_message(w->public_key, msg, s.signature))
      return {VerdictCode::signature_failure, "invalid signature from " + s.witness_id};
    if (!signers.insert(s.witness_id).second)
      return {VerdictCode::signature_failure, "duplicate signature from " + s.witness_id};
  }
  for (const auto& [id, root] : ev.witness_roots)
    if (!signers.contains(id)) return {VerdictCode::signature_failure, "root of " + id + " is not signed"};
  return {};
}

/// Externally verifies an evidence object. When the zone's block log is
/// supplied, also checks that block_ref is the block finalized before the
/// claim's interval and that the claim's own block admits it.
inline Verdict verify_evidence(const EvidenceObject& ev, const ZoneRegistry& registry,
                               const std::set<std::string>& known_policies,
                               std::optional<std::span<const Block>> chain = std::nullopt) {
  if (ev.zone_id != registry.zone_id || ev.claim.zone_id != ev.zone_id)
    return {VerdictCode::unknown_zone, "zone '" + ev.zone_id + "'"};
  if (!known_policies.contains(ev.policy_id))
    return {VerdictCode::unknown_policy, "policy '" + ev.policy_id + "'"};
  if (static_cast<int>(ev.witness_roots.size()) < registry.quorum_k ||
      static_cast<int>(ev.quorum_signatures.size()) < registry.quorum_k)
    return {VerdictCode::insufficient_quorum, std::to_string(ev.witness_roots.size()) + " roots, k = " +
                                                  std::to_string(registry.quorum_k)};
  if (Verdict v = verify_quorum_signature(ev, registry); !v.ok()) return v;
  if (chain) {
    const auto& blocks = *chain;
    const auto i = ev.claim.interval_index;
    if (!verify_chain(blocks)) return {VerdictCode::block_binding_mismatch, "block log does not verify"};
    if (i == 0 || i >= blocks.size())
      return {VerdictCode::block_binding_mismatch, "interval " + std::to_string(i) + " not in block log"};
    if (blocks[i - 1].digest != ev.block_ref)
      return {VerdictCode::block_binding_mismatch, "block_ref differs from block " + std::to_string(i - 1)};
    const auto& ids = blocks[i].admitted_claim_ids;
    if (!std::binary_search(ids.begin(), ids.end(), ev.claim.claim_id))
      return {VerdictCode::block_binding_mismatch, "claim not admitted in block " + std::to_string(i)};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Binary files: 4-byte magic, version byte, canonical encoding.

inline constexpr std::array<std::uint8_t, 4> kEvidenceMagic{'W', 'Z', 'E', 'V'};
inline constexpr std::array<std::uint8_t, 4> kChainMagic{'W', 'Z', 'B', 'C'};
inline constexpr std::uint8_t kFileVersion = 1;

namespace detail {
inline Bytes frame(const std::array<std::uint8_t, 4>& magic, const Bytes& body) {
  Bytes out(magic.begin(), magic.end());
  out.push_back(kFileVersion);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

inline std::span<const std::uint8_t> unframe(const std::array<std::uint8_t, 4>& magic,
                                             std::span<const std::uint8_t> data) {
  if (data.size() < 5) throw DecodeError("file too short for header");
  if (!std::equal(magic.begin(), magic.end(), data.begin())) throw DecodeError("bad magic");
  if (data[4] != kFileVersion) throw DecodeError("unsupported version " + std::to_string(data[4]));
  return data.subspan(5);
}
}  // namespace detail

inline Bytes serialize_evidence(const EvidenceObject& ev) {
  return detail::frame(kEvidenceMagic, canonical_encode(ev));
}

inline EvidenceObject deserialize_evidence(std::span<const std::uint8_t> data) {
  return canonical_decode<EvidenceObject>(detail::unframe(kEvidenceMagic, data));
}

struct BlockLog {
  std::vector<Block> blocks;
};

inline void encode_fields(Encoder& e, const BlockLog& log) {
  e.sequence(log.blocks, [](Encoder& n, const Block& b) { encode_fields(n, b); });
}

inline void decode_fields(Decoder& d, BlockLog& log) {
  log.blocks.clear();
  d.sequence([&](Decoder& n) {
    Block b;
    decode_fields(n, b);
    log.blocks.push_back(std::move(b));
  });
}

inline Bytes serialize_chain(std::span<const Block> blocks) {
  return detail::frame(kChainMagic, canonical_encode(BlockLog{{blocks.begin(), blocks.end()}}));
}

inline std::vector<Block> deserialize_chain(std::span<const std::uint8_t> data) {
  return canonical_decode<BlockLog>(detail::unframe(kChainMagic, data)).blocks;
}

inline Bytes read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

inline void write_file_bytes(const std::string& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

}  // namespace wzone
