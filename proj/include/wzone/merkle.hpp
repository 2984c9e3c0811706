#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "wzone/crypto.hpp"
#include "wzone/encoding.hpp"

namespace wzone {

class MerkleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline Digest merkle_leaf_hash(std::span<const std::uint8_t> leaf) { return sha256_prefixed(0x00, leaf); }

inline Digest merkle_node_hash(const Digest& left, const Digest& right) {
  std::uint8_t buf[64];
  std::copy(left.begin(), left.end(), buf);
  std::copy(right.begin(), right.end(), buf + 32);
  return sha256_prefixed(0x01, {buf, 64});
}

namespace detail {
// Next level up; an odd trailing node is paired with itself.
inline std::vector<Digest> merkle_parent_level(const std::vector<Digest>& level) {
  std::vector<Digest> up;
  up.reserve((level.size() + 1) / 2);
  for (std::size_t i = 0; i < level.size(); i += 2) {
    const Digest& right = i + 1 < level.size() ? level[i + 1] : level[i];
    up.push_back(merkle_node_hash(level[i], right));
  }
  return up;
}

inline std::vector<Digest> merkle_leaf_level(std::span<const Bytes> leaves) {
  if (leaves.empty()) throw MerkleError("merkle tree needs at least one leaf");
  std::vector<Digest> level;
  level.reserve(leaves.size());
  for (const auto& l : leaves) level.push_back(merkle_leaf_hash(l));
  return level;
}
}  // namespace detail

inline Digest merkle_root(std::span<const Bytes> leaves) {
  auto level = detail::merkle_leaf_level(leaves);
  while (level.size() > 1) level = detail::merkle_parent_level(level);
  return level.front();
}

/// Authentication path for one leaf, bottom-up.
struct MerkleProof {
  std::size_t index = 0;
  std::size_t leaf_count = 0;
  std::vector<Digest> siblings;
};

inline MerkleProof prove_leaf(std::span<const Bytes> leaves, std::size_t index) {
  if (index >= leaves.size()) throw MerkleError("leaf index out of range");
  MerkleProof proof{index, leaves.size(), {}};
  auto level = detail::merkle_leaf_level(leaves);
  std::size_t i = index;
  while (level.size() > 1) {
    const std::size_t sib = (i % 2 == 0) ? (i + 1 < level.size() ? i + 1 : i) : i - 1;
    proof.siblings.push_back(level[sib]);
    level = detail::merkle_parent_level(level);
    i /= 2;
  }
  return proof;
}

inline bool verify_leaf(const Digest& root, std::span<const std::uint8_t> leaf, const MerkleProof& proof) {
  if (proof.leaf_count == 0 || proof.index >= proof.leaf_count) return false;
  std::size_t width = proof.leaf_count;
  std::size_t i = proof.index;
  Digest cur = merkle_leaf_hash(leaf);
  std::size_t used = 0;
  while (width > 1) {
    if (used >= proof.siblings.size()) return false;
    const Digest& sib = proof.siblings[used++];
    const bool lone = (i % 2 == 0) && (i + 1 == width);
    if (lone && sib != cur) return false;
    cur = (i % 2 == 0) ? merkle_node_hash(cur, sib) : merkle_node_hash(sib, cur);
    i /= 2;
    width = (width + 1) / 2;
  }
  return used == proof.siblings.size() && cur == root;
}

}  // namespace wzone
