#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace wzone {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

inline constexpr Digest kZeroDigest{};

/// Malformed canonical bytes (truncation, bad length, non-canonical text).
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

inline Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw DecodeError("odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw DecodeError("invalid hex digit");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

/// Shortest decimal text that round-trips to the same double.
inline std::string real_to_text(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite real in canonical encoding");
  if (v == 0.0) v = 0.0;  // fold -0 into +0
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Canonical encoder. Every field is a 4-byte big-endian length followed by
/// its content: integers as 8-byte big-endian, reals as shortest round-trip
/// decimal text, strings as UTF-8, records and sequences as nested fields.
class Encoder {
 public:
  Encoder& u64(std::uint64_t v) {
    std::uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
    return field({b, 8});
  }
  Encoder& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
  Encoder& boolean(bool v) { return u64(v ? 1 : 0); }
  Encoder& real(double v) { return str(real_to_text(v)); }
  Encoder& str(std::string_view s) {
    return field({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
  }
  Encoder& bytes(std::span<const std::uint8_t> b) { return field(b); }

  template <class F>
    requires std::invocable<F, Encoder&>
  Encoder& nested(F&& fill) {
    Encoder inner;
    fill(inner);
    return field(inner.out_);
  }

  /// Sequence: element count, then one nested field per element.
  template <class Range, class F>
  Encoder& sequence(const Range& items, F&& each) {
    return nested([&](Encoder& inner) {
      inner.u64(static_cast<std::uint64_t>(std::size(items)));
      for (const auto& item : items) inner.nested([&](Encoder& e) { each(e, item); });
    });
  }

  [[nodiscard]] const Bytes& data() const { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Encoder& field(std::span<const std::uint8_t> content) {
    const auto n = static_cast<std::uint32_t>(content.size());
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(n >> (24 - 8 * i)));
    out_.insert(out_.end(), content.begin(), content.end());
    return *this;
  }

  Bytes out_;
};

/// Strict decoder for Encoder output. Throws DecodeError on any deviation.
class Decoder {
 public:
  explicit Decoder(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint64_t u64() {
    auto f = field();
    if (f.size() != 8) throw DecodeError("integer field must be 8 bytes");
    std::uint64_t v = 0;
    for (auto b : f) v = (v << 8) | b;
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  bool boolean() {
    const auto v = u64();
    if (v > 1) throw DecodeError("boolean field out of range");
    return v == 1;
  }
  double real() {
    const std::string text = str();
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
      throw DecodeError("malformed real '" + text + "'");
    if (!std::isfinite(v) || real_to_text(v) != text)
      throw DecodeError("non-canonical real '" + text + "'");
    return v;
  }
  std::string str() {
    auto f = field();
    return std::string(reinterpret_cast<const char*>(f.data()), f.size());
  }
  Bytes bytes() {
    auto f = field();
    return Bytes(f.begin(), f.end());
  }
  Digest digest() {
    auto f = field();
    if (f.size() != 32) throw DecodeError("digest field must be 32 bytes");
    Digest d;
    std::copy(f.begin(), f.end(), d.begin());
    return d;
  }

  template <class F>
  void nested(F&& read) {
    Decoder inner(field());
    read(inner);
    inner.expect_end();
  }

  template <class F>
  void sequence(F&& each_element) {
    nested([&](Decoder& inner) {
      const auto count = inner.u64();
      if (count > inner.remaining()) throw DecodeError("sequence count exceeds payload");
      for (std::uint64_t i = 0; i < count; ++i) inner.nested(each_element);
    });
  }

  [[nodiscard]] std::size_t remaining() const { return in_.size() - pos_; }
  void expect_end() const {
    if (pos_ != in_.size()) throw DecodeError("trailing bytes after record");
  }

 private:
  std::span<const std::uint8_t> field() {
    if (remaining() < 4) throw DecodeError("truncated length prefix");
    std::uint32_t n = 0;
    for (int i = 0; i < 4; ++i) n = (n << 8) | in_[pos_ + i];
    pos_ += 4;
    if (remaining() < n) throw DecodeError("truncated field");
    auto f = in_.subspan(pos_, n);
    pos_ += n;
    return f;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

/// A record type is registered for canonical encoding by providing
/// `encode_fields(Encoder&, const T&)` and `decode_fields(Decoder&, T&)`
/// findable by ADL. Unregistered types are rejected at compile time.
template <class T>
concept CanonicalRecord = requires(Encoder& e, Decoder& d, const T& ct, T& t) {
  encode_fields(e, ct);
  decode_fields(d, t);
};

template <CanonicalRecord T>
Bytes canonical_encode(const T& record) {
  Encoder e;
  encode_fields(e, record);
  return e.take();
}

template <CanonicalRecord T>
T canonical_decode(std::span<const std::uint8_t> bytes) {
  Decoder d(bytes);
  T out{};
  decode_fields(d, out);
  d.expect_end();
  return out;
}

}  // namespace wzone
