#pragma once

#include <sodium.h>

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "wzone/encoding.hpp"

namespace wzone {

namespace detail {
inline void ensure_sodium() {
  static const bool ok = [] { return sodium_init() >= 0; }();
  if (!ok) throw std::runtime_error("libsodium initialization failed");
}
}  // namespace detail

inline Digest sha256(std::span<const std::uint8_t> data) {
  detail::ensure_sodium();
  Digest out;
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

/// Domain-separated hash: H(prefix || data).
inline Digest sha256_prefixed(std::uint8_t prefix, std::span<const std::uint8_t> data) {
  detail::ensure_sodium();
  crypto_hash_sha256_state st;
  crypto_hash_sha256_init(&st);
  crypto_hash_sha256_update(&st, &prefix, 1);
  crypto_hash_sha256_update(&st, data.data(), data.size());
  Digest out;
  crypto_hash_sha256_final(&st, out.data());
  return out;
}

using PublicKey = std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES>;
using SecretKey = std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES>;
inline constexpr std::size_t kSignatureBytes = crypto_sign_BYTES;

struct KeyPair {
  PublicKey public_key{};
  SecretKey secret_key{};
};

/// Ed25519 key pair from a 32-byte seed.
inline KeyPair keypair_from_seed(const Digest& seed) {
  detail::ensure_sodium();
  KeyPair kp;
  crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed.data());
  return kp;
}

/// Deterministic Ed25519 signature.
inline Bytes sign_message(const SecretKey& sk, std::span<const std::uint8_t> msg) {
  detail::ensure_sodium();
  Bytes sig(kSignatureBytes);
  crypto_sign_detached(sig.data(), nullptr, msg.data(), msg.size(), sk.data());
  return sig;
}

inline bool verify_message(const PublicKey& pk, std::span<const std::uint8_t> msg,
                           std::span<const std::uint8_t> sig) {
  detail::ensure_sodium();
  if (sig.size() != kSignatureBytes) return false;
  return crypto_sign_verify_detached(sig.data(), msg.data(), msg.size(), pk.data()) == 0;
}

inline PublicKey public_key_from_hex(const std::string& hex) {
  const Bytes raw = from_hex(hex);
  if (raw.size() != crypto_sign_PUBLICKEYBYTES) throw DecodeError("public key must be 32 bytes");
  PublicKey pk;
  std::copy(raw.begin(), raw.end(), pk.begin());
  return pk;
}

}  // namespace wzone
