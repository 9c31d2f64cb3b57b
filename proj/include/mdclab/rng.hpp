#pragma once

#include <cstdint>

#include "mdclab/block.hpp"

namespace mdclab {

/// SplitMix64: tiny seedable generator with full 2^64 period. Used for all
/// randomness in the lab; reproducibility of experiments depends only on the
/// seeds, never on scheduling, because every trial derives its own stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform value in [0, bound), bound >= 1. Rejection sampling, unbiased.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw bounds_error("next_below: bound must be positive");
    const std::uint64_t limit = ~0ull - (~0ull % bound + 1) % bound;
    std::uint64_t v;
    do {
      v = next();
    } while (v > limit);
    return v % bound;
  }

 private:
  std::uint64_t state_;
};

/// Hierarchical sub-seeding: a root seed plus an index yields an independent
/// stream seed (murmur-style finalizer over the combined words).
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  std::uint64_t z = root ^ (0x9E3779B97F4A7C15ull * (index + 0x632BE59BD9B4E019ull));
  z = (z ^ (z >> 33)) * 0xFF51AFD7ED558CCDull;
  z = (z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53ull;
  return z ^ (z >> 33);
}

inline Block random_block(BlockWidth w, SplitMix64& rng) {
  detail::U128 v{rng.next(), w.bits() > 64 ? rng.next() : 0};
  return Block::from_raw(w, v);
}

}  // namespace mdclab
