#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdclab/error.hpp"

namespace mdclab {

namespace detail {

/// Minimal 128-bit unsigned value, enough for block arithmetic up to n=128.
struct U128 {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  friend constexpr U128 operator^(U128 a, U128 b) { return {a.lo ^ b.lo, a.hi ^ b.hi}; }
  friend constexpr U128 operator&(U128 a, U128 b) { return {a.lo & b.lo, a.hi & b.hi}; }
  friend constexpr U128 operator|(U128 a, U128 b) { return {a.lo | b.lo, a.hi | b.hi}; }
  friend constexpr U128 operator~(U128 a) { return {~a.lo, ~a.hi}; }
  constexpr bool operator==(const U128&) const = default;
};

constexpr U128 shl(U128 v, unsigned s) {
  if (s == 0) return v;
  if (s >= 128) return {};
  if (s >= 64) return {0, v.lo << (s - 64)};
  return {v.lo << s, (v.hi << s) | (v.lo >> (64 - s))};
}

constexpr U128 shr(U128 v, unsigned s) {
  if (s == 0) return v;
  if (s >= 128) return {};
  if (s >= 64) return {v.hi >> (s - 64), 0};
  return {(v.lo >> s) | (v.hi << (64 - s)), v.hi >> s};
}

/// Low `bits` ones, bits in [0,128].
constexpr U128 mask(unsigned bits) {
  if (bits == 0) return {};
  if (bits >= 128) return {~0ull, ~0ull};
  if (bits > 64) return {~0ull, ~0ull >> (128 - bits)};
  if (bits == 64) return {~0ull, 0};
  return {~0ull >> (64 - bits), 0};
}

constexpr bool is_zero(U128 v) { return v.lo == 0 && v.hi == 0; }

constexpr unsigned popcount128(U128 v) {
  unsigned c = 0;
  for (std::uint64_t w : {v.lo, v.hi})
    for (; w; w &= w - 1) ++c;
  return c;
}

/// Rotate the low `len` bits of v right by s (the rest of v must be zero).
constexpr U128 rotr_field(U128 v, unsigned len, unsigned s) {
  s %= len;
  if (s == 0) return v;
  return (shr(v, s) | shl(v, len - s)) & mask(len);
}

}  // namespace detail

/// Validated block width in bits. Every width in this library is even (the
/// EPBC feedback function splits blocks into equal halves) and at most 128.
class BlockWidth {
 public:
  explicit BlockWidth(unsigned bits) : bits_(bits) {
    if (bits < 2 || bits > 128 || bits % 2 != 0)
      throw width_error("block width must be even and in [2,128], got " + std::to_string(bits));
  }

  unsigned bits() const { return bits_; }
  unsigned bytes() const { return (bits_ + 7) / 8; }
  unsigned hex_digits() const { return (bits_ + 3) / 4; }

  bool operator==(const BlockWidth&) const = default;

 private:
  unsigned bits_;
};

/// Fixed-width bit string. Bit positions are 1-based, position 1 being the
/// leftmost bit; the serialized form is big-endian within bytes (leftmost
/// bit = most significant bit of the first byte). Values are immutable in
/// spirit: all operations return new blocks.
class Block {
 public:
  explicit Block(BlockWidth w) : width_(w) {}

  static Block zeros(BlockWidth w) { return Block(w); }

  static Block ones(BlockWidth w) {
    Block b(w);
    b.value_ = detail::mask(w.bits());
    return b;
  }

  /// Block from an integer value; requires value < 2^n. The integer's least
  /// significant bit becomes the rightmost bit of the block.
  static Block from_u64(BlockWidth w, std::uint64_t value) {
    if (w.bits() < 64 && (value >> w.bits()) != 0)
      throw width_error("value does not fit in " + std::to_string(w.bits()) + " bits");
    Block b(w);
    b.value_ = {value, 0};
    return b;
  }

  /// Parse lowercase/uppercase hex, leftmost bit first. The string must have
  /// exactly ceil(n/4) digits; trailing pad bits (when n % 4 != 0) must be 0.
  static Block from_hex(BlockWidth w, std::string_view hex) {
    if (hex.size() != w.hex_digits())
      throw format_error("hex string must have exactly " + std::to_string(w.hex_digits()) +
                         " digits for width " + std::to_string(w.bits()));
    detail::U128 acc{};
    for (char c : hex) {
      unsigned d;
      if (c >= '0' && c <= '9') d = static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f') d = static_cast<unsigned>(c - 'a') + 10;
      else if (c >= 'A' && c <= 'F') d = static_cast<unsigned>(c - 'A') + 10;
      else throw format_error(std::string("invalid hex digit '") + c + "'");
      acc = detail::shl(acc, 4) | detail::U128{d, 0};
    }
    const unsigned pad = w.hex_digits() * 4 - w.bits();
    if (!detail::is_zero(acc & detail::mask(pad)))
      throw format_error("nonzero padding bits in hex string");
    Block b(w);
    b.value_ = detail::shr(acc, pad);
    return b;
  }

  static Block from_bytes(BlockWidth w, std::span<const std::uint8_t> bytes) {
    if (bytes.size() != w.bytes())
      throw format_error("expected " + std::to_string(w.bytes()) + " bytes for width " +
                         std::to_string(w.bits()) + ", got " + std::to_string(bytes.size()));
    detail::U128 acc{};
    for (std::uint8_t byte : bytes) acc = detail::shl(acc, 8) | detail::U128{byte, 0};
    const unsigned pad = w.bytes() * 8 - w.bits();
    if (!detail::is_zero(acc & detail::mask(pad)))
      throw format_error("nonzero padding bits in serialized block");
    Block b(w);
    b.value_ = detail::shr(acc, pad);
    return b;
  }

  BlockWidth width() const { return width_; }

  std::string to_hex() const {
    const unsigned digits = width_.hex_digits();
    const unsigned pad = digits * 4 - width_.bits();
    detail::U128 v = detail::shl(value_, pad);
    std::string out(digits, '0');
    for (unsigned i = 0; i < digits; ++i) {
      unsigned d = static_cast<unsigned>(detail::shr(v, 4 * (digits - 1 - i)).lo & 0xF);
      out[i] = "0123456789abcdef"[d];
    }
    return out;
  }

  std::vector<std::uint8_t> to_bytes() const {
    const unsigned nbytes = width_.bytes();
    const unsigned pad = nbytes * 8 - width_.bits();
    detail::U128 v = detail::shl(value_, pad);
    std::vector<std::uint8_t> out(nbytes);
    for (unsigned i = 0; i < nbytes; ++i)
      out[i] = static_cast<std::uint8_t>(detail::shr(v, 8 * (nbytes - 1 - i)).lo & 0xFF);
    return out;
  }

  /// Bit at 1-based position i, counted from the left.
  bool bit(unsigned i) const {
    check_pos(i);
    return (detail::shr(value_, width_.bits() - i).lo & 1) != 0;
  }

  Block with_bit(unsigned i, bool v) const {
    check_pos(i);
    Block out = *this;
    detail::U128 m = detail::shl(detail::U128{1, 0}, width_.bits() - i);
    out.value_ = v ? (out.value_ | m) : (out.value_ & ~m);
    return out;
  }

  bool is_zero() const { return detail::is_zero(value_); }
  unsigned hamming_weight() const { return detail::popcount128(value_); }

  Block operator^(const Block& other) const {
    if (width_ != other.width_)
      throw width_error("xor of blocks with different widths (" + std::to_string(width_.bits()) +
                        " vs " + std::to_string(other.width_.bits()) + ")");
    Block out = *this;
    out.value_ = value_ ^ other.value_;
    return out;
  }

  Block& operator^=(const Block& other) { return *this = *this ^ other; }

  /// Bitwise complement of all n bits.
  Block operator~() const {
    Block out = *this;
    out.value_ = ~value_ & detail::mask(width_.bits());
    return out;
  }

  bool operator==(const Block& other) const {
    return width_ == other.width_ && value_ == other.value_;
  }
  bool operator!=(const Block& other) const { return !(*this == other); }

  /// Raw value, right-justified. Internal plumbing for the feedback
  /// functions, permutations, and hashing; not part of the bit-position API.
  detail::U128 raw() const { return value_; }
  static Block from_raw(BlockWidth w, detail::U128 v) {
    Block b(w);
    b.value_ = v & detail::mask(w.bits());
    return b;
  }

 private:
  void check_pos(unsigned i) const {
    if (i < 1 || i > width_.bits())
      throw bounds_error("bit position " + std::to_string(i) + " outside 1.." +
                         std::to_string(width_.bits()));
  }

  BlockWidth width_;
  detail::U128 value_{};
};

inline Block xor_blocks(const Block& a, const Block& b) { return a ^ b; }

}  // namespace mdclab
