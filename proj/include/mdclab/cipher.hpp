#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <numeric>
#include <vector>

#include "mdclab/block.hpp"
#include "mdclab/rng.hpp"

namespace mdclab {

/// A key-bound block cipher over n-bit blocks. Implementations must realize
/// a bijection: decrypt_block(encrypt_block(X)) = X for every X. Constructed
/// instances are immutable and safe to share between threads.
class BlockCipher {
 public:
  virtual ~BlockCipher() = default;
  virtual BlockWidth width() const = 0;
  virtual Block encrypt_block(const Block& x) const = 0;
  virtual Block decrypt_block(const Block& x) const = 0;

 protected:
  void check_width(const Block& x) const {
    if (x.width() != width()) throw width_error("block width does not match cipher width");
  }
};

using CipherPtr = std::shared_ptr<const BlockCipher>;

namespace detail {

/// Ideal permutation: a uniformly shuffled table over all 2^n blocks,
/// generated by a seeded Fisher-Yates shuffle. This is the default backend
/// for statistical experiments, since it has no cipher artifacts at all.
class IdealCipher final : public BlockCipher {
 public:
  IdealCipher(std::uint64_t seed, BlockWidth w) : width_(w) {
    if (w.bits() > 20)
      throw capacity_error("ideal (table) cipher supports widths up to 20 bits, got " +
                           std::to_string(w.bits()));
    const std::uint32_t size = 1u << w.bits();
    table_.resize(size);
    std::iota(table_.begin(), table_.end(), 0u);
    SplitMix64 rng(seed);
    for (std::uint32_t i = size - 1; i > 0; --i) {
      std::uint32_t j = static_cast<std::uint32_t>(rng.next_below(i + 1));
      std::swap(table_[i], table_[j]);
    }
    inverse_.resize(size);
    for (std::uint32_t i = 0; i < size; ++i) inverse_[table_[i]] = i;
  }

  BlockWidth width() const override { return width_; }

  Block encrypt_block(const Block& x) const override {
    check_width(x);
    return Block::from_u64(width_, table_[x.raw().lo]);
  }

  Block decrypt_block(const Block& x) const override {
    check_width(x);
    return Block::from_u64(width_, inverse_[x.raw().lo]);
  }

 private:
  BlockWidth width_;
  std::vector<std::uint32_t> table_;
  std::vector<std::uint32_t> inverse_;
};

/// Balanced Feistel network over n/2-bit halves with a murmur-style keyed
/// round function. It is a toy with no security claim: its job is to give a
/// deterministic keyed bijection at widths where tables are infeasible.
class FeistelCipher final : public BlockCipher {
 public:
  FeistelCipher(const std::array<std::uint8_t, 16>& key, BlockWidth w, unsigned rounds)
      : width_(w), rounds_(rounds) {
    if (rounds < 8) throw config_error("feistel rounds must be >= 8");
    std::uint64_t k0 = 0, k1 = 0;
    for (int i = 0; i < 8; ++i) k0 = (k0 << 8) | key[static_cast<std::size_t>(i)];
    for (int i = 8; i < 16; ++i) k1 = (k1 << 8) | key[static_cast<std::size_t>(i)];
    round_keys_.resize(rounds);
    SplitMix64 ks(derive_seed(k0, k1));
    for (auto& rk : round_keys_) rk = ks.next();
  }

  BlockWidth width() const override { return width_; }

  Block encrypt_block(const Block& x) const override {
    check_width(x);
    const unsigned m = width_.bits() / 2;
    std::uint64_t l = detail::shr(x.raw(), m).lo;
    std::uint64_t r = (x.raw() & detail::mask(m)).lo;
    for (unsigned i = 0; i < rounds_; ++i) {
      std::uint64_t t = l ^ round_fn(r, round_keys_[i], m);
      l = r;
      r = t;
    }
    return assemble(l, r, m);
  }

  Block decrypt_block(const Block& x) const override {
    check_width(x);
    const unsigned m = width_.bits() / 2;
    std::uint64_t l = detail::shr(x.raw(), m).lo;
    std::uint64_t r = (x.raw() & detail::mask(m)).lo;
    for (unsigned i = rounds_; i > 0; --i) {
      std::uint64_t t = r ^ round_fn(l, round_keys_[i - 1], m);
      r = l;
      l = t;
    }
    return assemble(l, r, m);
  }

 private:
  static std::uint64_t round_fn(std::uint64_t half, std::uint64_t rk, unsigned m) {
    std::uint64_t z = half ^ rk;
    z = (z ^ (z >> 33)) * 0xFF51AFD7ED558CCDull;
    z = (z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53ull;
    z ^= z >> 33;
    return m >= 64 ? z : (z & ((1ull << m) - 1));
  }

  Block assemble(std::uint64_t l, std::uint64_t r, unsigned m) const {
    return Block::from_raw(width_, detail::shl(detail::U128{l, 0}, m) | detail::U128{r, 0});
  }

  BlockWidth width_;
  unsigned rounds_;
  std::vector<std::uint64_t> round_keys_;
};

}  // namespace detail

inline CipherPtr ideal_cipher(std::uint64_t seed, BlockWidth w) {
  return std::make_shared<detail::IdealCipher>(seed, w);
}

inline CipherPtr feistel_cipher(const std::array<std::uint8_t, 16>& key, BlockWidth w,
                                unsigned rounds = 16) {
  return std::make_shared<detail::FeistelCipher>(key, w, rounds);
}

}  // namespace mdclab
