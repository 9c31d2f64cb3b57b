#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "mdclab/block.hpp"
#include "mdclab/feedback.hpp"

namespace mdclab {

/// A permutation of bit positions {1..n}. mapping[i-1] is the position that
/// the bit at position i moves to. This is the combinatorial view of the
/// IOBC feedback function used for cycle analysis: orders and fixed-point
/// counts of g^k fall out of the cycle structure.
class PositionPermutation {
 public:
  explicit PositionPermutation(std::vector<std::uint16_t> mapping) : map_(std::move(mapping)) {
    const std::size_t n = map_.size();
    if (n == 0 || n > 128) throw width_error("permutation size must be in [1,128]");
    std::vector<bool> seen(n + 1, false);
    for (std::uint16_t t : map_) {
      if (t < 1 || t > n || seen[t]) throw bounds_error("mapping is not a bijection on {1..n}");
      seen[t] = true;
    }
  }

  static PositionPermutation identity(unsigned n) {
    std::vector<std::uint16_t> m(n);
    for (unsigned i = 0; i < n; ++i) m[i] = static_cast<std::uint16_t>(i + 1);
    return PositionPermutation(std::move(m));
  }

  unsigned size() const { return static_cast<unsigned>(map_.size()); }

  /// Target position of the bit at 1-based position i.
  std::uint16_t target(unsigned i) const {
    if (i < 1 || i > map_.size()) throw bounds_error("position out of range");
    return map_[i - 1];
  }

  Block apply(const Block& x) const {
    if (x.width().bits() != map_.size())
      throw width_error("block width does not match permutation size");
    Block out(x.width());
    for (unsigned i = 1; i <= map_.size(); ++i)
      if (x.bit(i)) out = out.with_bit(map_[i - 1], true);
    return out;
  }

  PositionPermutation inverse() const {
    std::vector<std::uint16_t> inv(map_.size());
    for (unsigned i = 0; i < map_.size(); ++i) inv[map_[i] - 1] = static_cast<std::uint16_t>(i + 1);
    return PositionPermutation(std::move(inv));
  }

  /// this^k (k-fold self-composition); power(0) is the identity.
  PositionPermutation power(std::uint64_t k) const {
    std::vector<std::uint16_t> out(map_.size());
    for (unsigned i = 1; i <= map_.size(); ++i) {
      unsigned len = 1;
      for (unsigned q = map_[i - 1]; q != i; q = map_[q - 1]) ++len;
      unsigned p = i;
      for (std::uint64_t s = k % len; s > 0; --s) p = map_[p - 1];
      out[i - 1] = static_cast<std::uint16_t>(p);
    }
    return PositionPermutation(std::move(out));
  }

  bool is_identity() const {
    for (unsigned i = 0; i < map_.size(); ++i)
      if (map_[i] != i + 1) return false;
    return true;
  }

  std::vector<unsigned> cycle_lengths() const {
    std::vector<unsigned> lens;
    std::vector<bool> seen(map_.size() + 1, false);
    for (unsigned i = 1; i <= map_.size(); ++i) {
      if (seen[i]) continue;
      unsigned len = 0;
      for (unsigned p = i; !seen[p]; p = map_[p - 1]) {
        seen[p] = true;
        ++len;
      }
      lens.push_back(len);
    }
    return lens;
  }

 private:
  std::vector<std::uint16_t> map_;
};

/// The bit-position permutation realized by the IOBC feedback function:
/// positions {1..m-1} rotate among themselves, positions {m..n} rotate among
/// themselves (n = 2m, n % 4 == 0).
inline PositionPermutation iobc_position_permutation(BlockWidth w) {
  detail::require_iobc_width(w);
  const unsigned n = w.bits(), m = n / 2;
  std::vector<std::uint16_t> map(n);
  for (unsigned i = 1; i <= m - 1; ++i)
    map[i - 1] = static_cast<std::uint16_t>(i == m - 1 ? 1 : i + 1);
  for (unsigned i = m; i <= n; ++i) map[i - 1] = static_cast<std::uint16_t>(i == n ? m : i + 1);
  return PositionPermutation(std::move(map));
}

/// Least i >= 1 with p^i = identity: lcm of the cycle lengths.
inline std::uint64_t permutation_order(const PositionPermutation& p) {
  std::uint64_t order = 1;
  for (unsigned len : p.cycle_lengths()) order = std::lcm(order, static_cast<std::uint64_t>(len));
  return order;
}

/// log2 of the fraction of n-bit blocks X with p^k(X) = X. A block is fixed
/// by p^k exactly when its bits are constant along every cycle of p^k, and a
/// length-L cycle of p splits into gcd(L,k) cycles of p^k, so the count is
/// 2^c with c = sum of gcd(L_i, k). Returns c - n (always <= 0), exact.
inline int fixed_point_log2_fraction(const PositionPermutation& p, std::uint64_t k) {
  if (k < 1) throw bounds_error("k must be >= 1");
  std::uint64_t cycles = 0;
  for (unsigned len : p.cycle_lengths()) cycles += std::gcd(static_cast<std::uint64_t>(len), k);
  return static_cast<int>(cycles) - static_cast<int>(p.size());
}

}  // namespace mdclab
