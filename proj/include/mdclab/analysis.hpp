#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mdclab/block.hpp"
#include "mdclab/feedback.hpp"
#include "mdclab/permutation.hpp"

namespace mdclab {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------------------
// Per-position semantics of the EPBC feedback function.
// ---------------------------------------------------------------------------

/// One (l, r) bit pair: the bits in corresponding positions of the two
/// halves of a block. Encoded as l*2 + r, so 00 < 01 < 10 < 11.
struct BitPair {
  bool l = false;
  bool r = false;

  constexpr unsigned code() const { return (l ? 2u : 0u) | (r ? 1u : 0u); }
  static constexpr BitPair from_code(unsigned c) { return {(c & 2u) != 0, (c & 1u) != 0}; }
  constexpr bool operator==(const BitPair&) const = default;

  std::string str() const { return std::string() + (l ? '1' : '0') + (r ? '1' : '0'); }
};

/// A non-empty-capable subset of the four bit-pair values, stored as a
/// 4-bit mask indexed by BitPair::code().
class PairSet {
 public:
  constexpr PairSet() = default;
  constexpr PairSet(std::initializer_list<BitPair> pairs) {
    for (BitPair p : pairs) insert(p);
  }

  static constexpr PairSet all() { return PairSet({{false, false}, {false, true}, {true, false}, {true, true}}); }

  constexpr void insert(BitPair p) { mask_ |= static_cast<std::uint8_t>(1u << p.code()); }
  constexpr bool contains(BitPair p) const { return (mask_ >> p.code()) & 1u; }
  constexpr unsigned size() const {
    unsigned c = 0;
    for (unsigned i = 0; i < 4; ++i) c += (mask_ >> i) & 1u;
    return c;
  }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr bool subset_of(PairSet other) const { return (mask_ & ~other.mask_) == 0; }
  constexpr bool operator==(const PairSet&) const = default;

  std::vector<BitPair> to_vector() const {
    std::vector<BitPair> out;
    for (unsigned c = 0; c < 4; ++c)
      if ((mask_ >> c) & 1u) out.push_back(BitPair::from_code(c));
    return out;
  }

  std::string str() const {
    std::string out = "{";
    bool first = true;
    for (const BitPair& p : to_vector()) {
      if (!first) out += ",";
      out += p.str();
      first = false;
    }
    return out + "}";
  }

 private:
  std::uint8_t mask_ = 0;
};

/// The per-position action of the EPBC feedback function:
/// l' = l or (not r), r' = l and (not r).
inline constexpr BitPair epbc_pair_map(BitPair p) {
  const bool nr = !p.r;
  return {p.l || nr, p.l && nr};
}

/// Image of a pair set under the per-position map.
inline PairSet pair_image(PairSet a) {
  if (a.empty()) throw bounds_error("pair_image: input set must be non-empty");
  PairSet b;
  for (unsigned c = 0; c < 4; ++c)
    if (a.contains(BitPair::from_code(c))) b.insert(epbc_pair_map(BitPair::from_code(c)));
  return b;
}

/// The published input/output possibility table for the EPBC per-position
/// map: every non-empty input set of size >= 1 that appears in the table,
/// with its output set. 15 rows: the full set, the four 3-subsets, the six
/// 2-subsets, the four singletons.
struct Table1Row {
  PairSet input;
  PairSet expected;
  PairSet computed;
  bool match = false;
};

struct Table1Report {
  std::vector<Table1Row> rows;
  bool all_match = true;
};

inline Table1Report verify_table1() {
  constexpr BitPair b00{false, false}, b01{false, true}, b10{true, false}, b11{true, true};
  const std::array<std::pair<PairSet, PairSet>, 15> table{{
      {PairSet{b00, b01, b10, b11}, PairSet{b00, b10, b11}},
      {PairSet{b01, b10, b11}, PairSet{b00, b10, b11}},
      {PairSet{b00, b10, b11}, PairSet{b10, b11}},
      {PairSet{b00, b01, b11}, PairSet{b00, b10}},
      {PairSet{b00, b01, b10}, PairSet{b00, b10, b11}},
      {PairSet{b10, b11}, PairSet{b10, b11}},
      {PairSet{b01, b11}, PairSet{b00, b10}},
      {PairSet{b01, b10}, PairSet{b00, b11}},
      {PairSet{b00, b11}, PairSet{b10}},
      {PairSet{b00, b10}, PairSet{b10, b11}},
      {PairSet{b00, b01}, PairSet{b00, b10}},
      {PairSet{b11}, PairSet{b10}},
      {PairSet{b10}, PairSet{b11}},
      {PairSet{b01}, PairSet{b00}},
      {PairSet{b00}, PairSet{b10}},
  }};
  Table1Report report;
  for (const auto& [input, expected] : table) {
    Table1Row row{input, expected, pair_image(input), false};
    row.match = row.computed == row.expected;
    report.all_match = report.all_match && row.match;
    report.rows.push_back(row);
  }
  return report;
}

/// Possibility propagation through one chaining step: if the pair in F_j is
/// known only up to membership in f_set, and the plaintext pair is p, then
/// the pair in g(G_{j+1}) lies in pair_image({f xor p : f in f_set}).
inline PairSet propagate_possibilities(PairSet f_set, BitPair p) {
  if (f_set.empty()) throw bounds_error("propagate_possibilities: empty set");
  PairSet shifted;
  for (const BitPair& f : f_set.to_vector())
    shifted.insert(BitPair{f.l != p.l, f.r != p.r});
  return pair_image(shifted);
}

/// Exhaustive check of the possibility-propagation floor: for every
/// 2-element F-possibility set and every plaintext pair, how small can the
/// propagated set get? Classified by the xor-difference of the two
/// possibilities. Differences 01 and 10 never drop below two possibilities
/// (this is what invalidates the earlier pair-elimination cryptanalysis);
/// difference 11 can collapse to one.
struct DiFlawClassResult {
  BitPair difference;
  unsigned min_size = 4;
  PairSet witness_set;   // an F-set attaining the minimum
  BitPair witness_p;     // together with the plaintext pair
  PairSet witness_out;
};

struct DiFlawReport {
  std::array<DiFlawClassResult, 3> classes;  // differences 01, 10, 11
};

inline DiFlawReport di_flaw_check() {
  DiFlawReport report;
  for (unsigned d = 1; d <= 3; ++d) report.classes[d - 1].difference = BitPair::from_code(d);
  for (unsigned a = 0; a < 4; ++a) {
    for (unsigned b = a + 1; b < 4; ++b) {
      const BitPair pa = BitPair::from_code(a), pb = BitPair::from_code(b);
      const unsigned diff = a ^ b;
      DiFlawClassResult& cls = report.classes[diff - 1];
      for (unsigned pc = 0; pc < 4; ++pc) {
        const BitPair p = BitPair::from_code(pc);
        PairSet out = propagate_possibilities(PairSet{pa, pb}, p);
        if (out.size() < cls.min_size) {
          cls.min_size = out.size();
          cls.witness_set = PairSet{pa, pb};
          cls.witness_p = p;
          cls.witness_out = out;
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Exact combinatorics.
// ---------------------------------------------------------------------------

inline BigInt binomial(unsigned m, unsigned k) {
  if (k > m) throw bounds_error("binomial: k > m");
  if (k > m - k) k = m - k;
  BigInt result = 1;
  for (unsigned i = 1; i <= k; ++i) {
    result *= m - k + i;
    result /= i;
  }
  return result;
}

/// Exact sum of binomial coefficients C(m,0) + ... + C(m,k).
inline BigInt binom_sum(unsigned m, unsigned k) {
  if (k > m) throw bounds_error("binom_sum: k > m");
  BigInt sum = 0;
  BigInt term = 1;  // C(m,0)
  for (unsigned i = 0;; ++i) {
    sum += term;
    if (i == k) break;
    term *= m - i;
    term /= i + 1;
  }
  return sum;
}

/// The closed-form bound sum_{i<=k} C(m,i) < C(m,k) * (m-k+1)/(m-2k+1),
/// valid for 0 <= k < m/2, returned as an exact rational. Note the bound is
/// strict only for k >= 1; at k = 0 both sides equal 1.
inline BigRational binco_bound(unsigned m, unsigned k) {
  if (m < 1) throw bounds_error("binco_bound: m must be >= 1");
  if (2 * k >= m) throw bounds_error("binco_bound: requires k < m/2");
  return BigRational(binomial(m, k) * (m - k + 1), m - 2 * k + 1);
}

inline double log2_big(const BigInt& v) {
  if (v <= 0) throw bounds_error("log2 of non-positive value");
  const long bits = static_cast<long>(boost::multiprecision::msb(v));
  if (bits <= 900) return std::log2(v.convert_to<double>());
  const BigInt shifted = v >> (bits - 64);
  return std::log2(shifted.convert_to<double>()) + static_cast<double>(bits - 64);
}

/// Round a positive integer to three significant figures, rendered like
/// "7.13e14". Exact string arithmetic, round-half-up.
inline std::string round_3sf(const BigInt& v) {
  if (v <= 0) throw bounds_error("round_3sf expects a positive value");
  std::string digits = v.str();
  const int exponent = static_cast<int>(digits.size()) - 1;
  std::string mant = digits.substr(0, 3);
  while (mant.size() < 3) mant += '0';
  if (digits.size() > 3 && digits[3] >= '5') {
    int i = 2;
    while (i >= 0 && mant[static_cast<std::size_t>(i)] == '9') {
      mant[static_cast<std::size_t>(i)] = '0';
      --i;
    }
    if (i < 0) return std::string("1.00e") + std::to_string(exponent + 1);
    mant[static_cast<std::size_t>(i)]++;
  }
  return std::string(1, mant[0]) + "." + mant.substr(1) + "e" + std::to_string(exponent);
}

// ---------------------------------------------------------------------------
// Attack-cost predictions.
// ---------------------------------------------------------------------------

/// Per-width cost summary: exact EPBC guess-space size (weight-limited
/// candidate count), the generic birthday budget 2^{n/2}, and the best
/// shortening parameter k for the IOBC rotation (the k < n^2/4 - 1
/// maximizing the fixed-point fraction of g^k), with its log2 success rate.
struct AttackCostRow {
  unsigned n = 0;
  BigInt guess_space;
  double guess_log2 = 0;
  double birthday_log2 = 0;
  std::uint64_t best_k = 0;
  int best_log2 = 0;
};

inline std::vector<AttackCostRow> attack_cost_table(std::span<const unsigned> widths) {
  std::vector<AttackCostRow> rows;
  for (unsigned n : widths) {
    if (n % 8 != 0) throw width_error("attack cost table requires widths divisible by 8");
    AttackCostRow row;
    row.n = n;
    row.guess_space = binom_sum(n / 2, n / 8);
    row.guess_log2 = log2_big(row.guess_space);
    row.birthday_log2 = n / 2.0;
    const PositionPermutation perm = iobc_position_permutation(BlockWidth(n));
    const std::uint64_t order = permutation_order(perm);
    int best = -static_cast<int>(n);
    std::uint64_t best_k = 1;
    for (std::uint64_t k = 1; k < order; ++k) {
      const int flog = fixed_point_log2_fraction(perm, k);
      if (flog > best) {
        best = flog;
        best_k = k;
      }
    }
    row.best_k = best_k;
    row.best_log2 = best;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mdclab
