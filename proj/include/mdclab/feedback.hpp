#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "mdclab/block.hpp"

namespace mdclab {

/// The feedback transformation g applied to G_{i-1} before it is mixed into
/// ciphertext block C_i. Identity and the IOBC rotation are bijective (and
/// linear over xor); the EPBC boolean mixer is neither.
enum class FeedbackFunctionId : std::uint8_t {
  Identity = 0,
  IobcRotation = 1,
  EpbcBoolean = 2,
};

inline const char* to_string(FeedbackFunctionId id) {
  switch (id) {
    case FeedbackFunctionId::Identity: return "identity";
    case FeedbackFunctionId::IobcRotation: return "iobc-rotation";
    case FeedbackFunctionId::EpbcBoolean: return "epbc-boolean";
  }
  return "?";
}

inline bool g_is_linear(FeedbackFunctionId id) { return id != FeedbackFunctionId::EpbcBoolean; }
inline bool g_is_bijective(FeedbackFunctionId id) { return id != FeedbackFunctionId::EpbcBoolean; }

inline Block g_identity(const Block& x) { return x; }

namespace detail {
inline void require_iobc_width(BlockWidth w) {
  if (w.bits() % 4 != 0)
    throw width_error("iobc feedback requires width divisible by 4, got " +
                      std::to_string(w.bits()));
}
}  // namespace detail

/// IOBC rotation: split X into L (leftmost m-1 bits) and R (rightmost m+1
/// bits), n = 2m, and rotate each part cyclically right by one position.
/// Requires n % 4 == 0 so that m is even; the resulting position permutation
/// then has coprime cycle lengths m-1 and m+1.
inline Block g_iobc(const Block& x) {
  detail::require_iobc_width(x.width());
  const unsigned n = x.width().bits();
  const unsigned m = n / 2;
  const unsigned rlen = m + 1, llen = m - 1;
  detail::U128 v = x.raw();
  detail::U128 r = v & detail::mask(rlen);
  detail::U128 l = detail::shr(v, rlen);
  return Block::from_raw(x.width(), detail::shl(detail::rotr_field(l, llen, 1), rlen) |
                                        detail::rotr_field(r, rlen, 1));
}

/// EPBC boolean mixer: with X = L||R over m-bit halves,
/// g(X) = (L OR NOT R) || (L AND NOT R). Not a bijection: the output pair at
/// each position is never (0,1).
inline Block g_epbc(const Block& x) {
  const unsigned m = x.width().bits() / 2;
  detail::U128 v = x.raw();
  detail::U128 r = v & detail::mask(m);
  detail::U128 l = detail::shr(v, m);
  detail::U128 nr = ~r & detail::mask(m);
  return Block::from_raw(x.width(), detail::shl(l | nr, m) | (l & nr));
}

inline Block g_apply(FeedbackFunctionId id, const Block& x) {
  switch (id) {
    case FeedbackFunctionId::Identity: return g_identity(x);
    case FeedbackFunctionId::IobcRotation: return g_iobc(x);
    case FeedbackFunctionId::EpbcBoolean: return g_epbc(x);
  }
  throw config_error("unknown feedback function");
}

/// k-fold iterate of g; g_pow(id, 0, x) = x. The IOBC rotation has a closed
/// form (rotate the two parts by k mod their lengths), used here so large k
/// stays cheap; equality with naive iteration is pinned by tests.
inline Block g_pow(FeedbackFunctionId id, std::uint64_t k, const Block& x) {
  switch (id) {
    case FeedbackFunctionId::Identity:
      return x;
    case FeedbackFunctionId::IobcRotation: {
      detail::require_iobc_width(x.width());
      const unsigned m = x.width().bits() / 2;
      const unsigned rlen = m + 1, llen = m - 1;
      detail::U128 v = x.raw();
      detail::U128 r = v & detail::mask(rlen);
      detail::U128 l = detail::shr(v, rlen);
      l = detail::rotr_field(l, llen, static_cast<unsigned>(k % llen));
      r = detail::rotr_field(r, rlen, static_cast<unsigned>(k % rlen));
      return Block::from_raw(x.width(), detail::shl(l, rlen) | r);
    }
    case FeedbackFunctionId::EpbcBoolean: {
      Block out = x;
      for (std::uint64_t i = 0; i < k; ++i) out = g_epbc(out);
      return out;
    }
  }
  throw config_error("unknown feedback function");
}

inline FeedbackFunctionId feedback_from_string(std::string_view s) {
  if (s == "identity") return FeedbackFunctionId::Identity;
  if (s == "iobc-rotation") return FeedbackFunctionId::IobcRotation;
  if (s == "epbc-boolean") return FeedbackFunctionId::EpbcBoolean;
  throw config_error("unknown feedback function '" + std::string(s) + "'");
}

}  // namespace mdclab
