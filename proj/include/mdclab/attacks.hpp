#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mdclab/analysis.hpp"
#include "mdclab/feedback.hpp"
#include "mdclab/modes.hpp"
#include "mdclab/permutation.hpp"

namespace mdclab {

/// Predicted success probability of a forgery, kept exact where the theory
/// gives an exact value (certainties, powers of two from the cycle argument,
/// binomial tail sums). `exact` is false for heuristic estimates such as the
/// birthday splice's "approximately one half".
struct SuccessPrediction {
  BigRational probability = 1;
  bool exact = true;

  static SuccessPrediction certain() { return {BigRational(1), true}; }

  static SuccessPrediction power_of_two(int log2) {
    if (log2 > 0) throw bounds_error("success probability cannot exceed 1");
    BigInt den = BigInt(1) << (-log2);
    return {BigRational(1, den), true};
  }

  static SuccessPrediction ratio(BigInt num, BigInt den, bool exact_value = true) {
    return {BigRational(std::move(num), std::move(den)), exact_value};
  }

  double log2() const {
    return log2_big(boost::multiprecision::numerator(probability)) -
           log2_big(boost::multiprecision::denominator(probability));
  }

  double value() const { return probability.convert_to<double>(); }
};

/// What the attacker had to know or control to build a forgery.
struct AttackKnowledge {
  std::vector<unsigned> known_plaintext_positions;  // 1-based positions in the source ciphertexts
  bool uses_internal_trace = false;                 // oracle-grade: consumed F/G internals
  std::uint64_t guesses = 0;                        // candidate submissions (guess attacks)
  std::uint64_t chosen_plaintext_queries = 0;       // seal-oracle queries (birthday attack)
  std::vector<std::string> notes;
};

/// A constructed forgery: the ciphertext to submit, the knowledge that built
/// it, and the predicted acceptance probability. Construction is pure;
/// submitting the plan to a verifier is a separate step.
struct ForgeryPlan {
  SequencedCiphertext forged;
  AttackKnowledge knowledge;
  SuccessPrediction predicted;
};

/// Accept/reject oracle with the same behaviour as open_verify, exposing
/// nothing else. Counts queries so attack costs can be reported exactly.
class VerifierOracle {
 public:
  explicit VerifierOracle(const ModeInstance& instance) : instance_(&instance) {}

  bool verify(const SequencedCiphertext& c) {
    ++queries_;
    return instance_->open_verify(c).accepted;
  }

  std::uint64_t queries() const { return queries_; }

 private:
  const ModeInstance* instance_;
  std::uint64_t queries_ = 0;
};

/// Seal oracle for chosen-plaintext attacks; counts messages sealed.
class SealOracle {
 public:
  explicit SealOracle(ModeInstance& instance) : instance_(&instance) {}

  SequencedCiphertext seal(std::span<const Block> message) {
    ++queries_;
    return instance_->seal(message);
  }

  std::uint64_t queries() const { return queries_; }
  const ModeInstance& instance() const { return *instance_; }

 private:
  ModeInstance* instance_;
  std::uint64_t queries_ = 0;
};

namespace detail {
inline void check_insert_index(std::size_t j, std::size_t t) {
  if (j <= 1 || j >= t)
    throw bounds_error("insertion index j must satisfy 1 < j < t (j=" + std::to_string(j) +
                       ", t=" + std::to_string(t) + ")");
}
}  // namespace detail

/// Known-plaintext insertion forgery against the identity-feedback mode:
/// given C_1..C_t and one known plaintext block P_j (1 < j < t), the
/// (t+2)-block ciphertext
///   C_1..C_j, P_j, C_j, C_{j+1}..C_t
/// decrypts with final block equal to the original P_t, so it passes the
/// integrity check with certainty.
inline ForgeryPlan forge_pes_insert(const SequencedCiphertext& c, unsigned j, const Block& p_j) {
  const std::size_t t = c.blocks.size();
  detail::check_insert_index(j, t);
  if (p_j.width() != c.blocks[0].width()) throw width_error("plaintext block width mismatch");

  ForgeryPlan plan;
  plan.forged.sequence = c.sequence;
  plan.forged.blocks.reserve(t + 2);
  for (std::size_t i = 1; i <= j; ++i) plan.forged.blocks.push_back(c.blocks[i - 1]);
  plan.forged.blocks.push_back(p_j);
  for (std::size_t i = j; i <= t; ++i) plan.forged.blocks.push_back(c.blocks[i - 1]);

  plan.knowledge.known_plaintext_positions = {j};
  plan.knowledge.notes = {"single known plaintext block, identity feedback"};
  plan.predicted = SuccessPrediction::certain();
  return plan;
}

/// Generalized insertion forgery for any feedback function: the inserted
/// block is P_j xor delta, where success is certain exactly when
/// delta = G_j xor g(G_j). With the identity feedback and delta = 0 this is
/// forge_pes_insert bit for bit.
inline ForgeryPlan forge_general_insert(const SequencedCiphertext& c, unsigned j, const Block& p_j,
                                        const Block& delta) {
  const std::size_t t = c.blocks.size();
  detail::check_insert_index(j, t);
  ForgeryPlan plan = forge_pes_insert(c, j, p_j ^ delta);
  plan.knowledge.notes = {"insertion with delta = G_j xor g(G_j) (exact or guessed)"};
  return plan;
}

/// Candidate deltas for the EPBC guess attack, most probable first.
///
/// For the EPBC feedback function the two halves of G_j xor g(G_j) are
/// complementary: with g(L||R) = L'||R', each position satisfies
/// l xor l' = not (r xor r'), and l xor l' = 1 exactly when l = r = 0, so
/// each bit of the left half H = L xor L' is 1 with probability 1/4 for
/// random input. Candidates are therefore H || not(H), enumerated with
/// weight(H) ascending (then lexicographic), cut off at `weight_limit`.
class EpbcDeltaCandidates {
 public:
  EpbcDeltaCandidates(BlockWidth width, unsigned weight_limit)
      : width_(width), half_(width.bits() / 2), limit_(weight_limit) {
    if (half_ > 64) throw width_error("candidate enumeration supports widths up to 128");
    if (limit_ > half_) limit_ = half_;
  }

  /// Spec default cutoff: n/8 ones in the guessed half (n divisible by 8).
  static unsigned default_weight_limit(BlockWidth width) {
    if (width.bits() % 8 != 0)
      throw width_error("default weight limit n/8 requires width divisible by 8");
    return width.bits() / 8;
  }

  static BigInt count(BlockWidth width, unsigned weight_limit) {
    const unsigned half = width.bits() / 2;
    return binom_sum(half, weight_limit > half ? half : weight_limit);
  }

  std::optional<Block> next() {
    while (true) {
      if (!have_current_) {
        if (weight_ > limit_) return std::nullopt;
        current_ = (weight_ == 0) ? 0 : ((~0ull) >> (64 - weight_));
        have_current_ = true;
      } else {
        if (weight_ == 0 || !gosper_advance()) {
          ++weight_;
          have_current_ = false;
          continue;
        }
      }
      if (weight_ != 0 && !fits(current_)) {
        ++weight_;
        have_current_ = false;
        continue;
      }
      return delta_from_half(current_);
    }
  }

 private:
  bool fits(std::uint64_t h) const { return half_ >= 64 || (h >> half_) == 0; }

  bool gosper_advance() {
    // next integer with the same popcount (Gosper's hack)
    const std::uint64_t v = current_;
    const std::uint64_t c = v & (~v + 1);
    const std::uint64_t r = v + c;
    if (c == 0 || r < v) return false;  // overflow: no more values
    current_ = (((v ^ r) >> 2) / c) | r;
    return fits(current_);
  }

  Block delta_from_half(std::uint64_t h) const {
    const detail::U128 left{h, 0};
    const detail::U128 right = ~left & detail::mask(half_);
    return Block::from_raw(width_, detail::shl(left, half_) | right);
  }

  BlockWidth width_;
  unsigned half_;
  unsigned limit_;
  unsigned weight_ = 0;
  std::uint64_t current_ = 0;
  bool have_current_ = false;
};

/// Exact probability that the EPBC guess attack succeeds: the chance that
/// weight(H) <= limit when each of the n/2 bits of H is one with
/// probability 1/4, i.e. sum_{i<=limit} C(m,i) 3^{m-i} / 4^m.
inline SuccessPrediction epbc_guess_success_probability(BlockWidth width, unsigned weight_limit) {
  const unsigned m = width.bits() / 2;
  if (weight_limit > m) weight_limit = m;
  BigInt num = 0;
  for (unsigned i = 0; i <= weight_limit; ++i) num += binomial(m, i) * boost::multiprecision::pow(BigInt(3), m - i);
  BigInt den = boost::multiprecision::pow(BigInt(4), m);
  return SuccessPrediction::ratio(std::move(num), std::move(den));
}

struct GuessOutcome {
  bool success = false;
  std::optional<ForgeryPlan> plan;
  std::uint64_t trials_used = 0;
};

/// Run the EPBC guess attack: submit the generalized insertion with each
/// candidate delta until the verifier accepts, the candidates run out, or
/// max_trials is reached.
inline GuessOutcome epbc_guess_forgery(const SequencedCiphertext& c, unsigned j, const Block& p_j,
                                       VerifierOracle& oracle, unsigned weight_limit,
                                       std::uint64_t max_trials) {
  detail::check_insert_index(j, c.blocks.size());
  EpbcDeltaCandidates candidates(c.blocks[0].width(), weight_limit);
  GuessOutcome out;
  while (out.trials_used < max_trials) {
    std::optional<Block> delta = candidates.next();
    if (!delta) break;
    ForgeryPlan plan = forge_general_insert(c, j, p_j, *delta);
    ++out.trials_used;
    if (oracle.verify(plan.forged)) {
      plan.knowledge.guesses = out.trials_used;
      plan.knowledge.known_plaintext_positions = {j};
      plan.predicted = epbc_guess_success_probability(c.blocks[0].width(), weight_limit);
      out.success = true;
      out.plan = std::move(plan);
      return out;
    }
  }
  return out;
}

/// Ciphertext splicing: prefix of one message joined to the suffix of
/// another through a corrected block. With correction
/// g(G'_{u-1}) xor g(G_{v-1}) the result
///   C'_1..C'_{u-1}, C_v xor correction, C_{v+1}..C_t    (sequence S')
/// decrypts to P'_1..P'_{u-1}, garbled block, P_{v+1}..P_t, keeping the
/// original final block and so the MDC. Works for every feedback function.
inline ForgeryPlan forge_splice(const SequencedCiphertext& c, const SequencedCiphertext& c_prime,
                                unsigned u, unsigned v, const Block& correction) {
  const std::size_t t = c.blocks.size(), t_prime = c_prime.blocks.size();
  if (u <= 1 || u >= t_prime)
    throw bounds_error("splice index u must satisfy 1 < u < t'");
  if (v <= 1 || v >= t) throw bounds_error("splice index v must satisfy 1 < v < t");
  if (c.blocks[0].width() != c_prime.blocks[0].width())
    throw width_error("spliced ciphertexts must share a width");

  ForgeryPlan plan;
  plan.forged.sequence = c_prime.sequence;
  plan.forged.blocks.reserve(t - v + u);
  for (std::size_t i = 1; i < u; ++i) plan.forged.blocks.push_back(c_prime.blocks[i - 1]);
  plan.forged.blocks.push_back(c.blocks[v - 1] ^ correction);
  for (std::size_t i = v + 1; i <= t; ++i) plan.forged.blocks.push_back(c.blocks[i - 1]);

  plan.knowledge.uses_internal_trace = true;
  plan.knowledge.notes = {"splice at u=" + std::to_string(u) + ", v=" + std::to_string(v) +
                          " with correction g(G'_{u-1}) xor g(G_{v-1})"};
  plan.predicted = SuccessPrediction::certain();
  return plan;
}

/// Shortening forgery against the IOBC rotation (any linear feedback):
/// splice a message to itself at u = j+1, v = j+2k+1. The correction
/// g(G_j) xor g(G_{j+2k}) equals g(Delta_k), with
///   Delta_k = xor_{i=1..k} g^{k-i}(C_{j+2i-1} xor P_{j+2i}),
/// whenever g^k fixes G_j; that event has probability 2^(c - n) where c is
/// the cycle count of the k-th power of the bit-position permutation. Needs
/// known plaintext only in the even positions P_{j+2}, ..., P_{j+2k}.
inline ForgeryPlan forge_iobc_shorten(const SequencedCiphertext& c, unsigned j, unsigned k,
                                      std::span<const Block> known_even_plaintexts,
                                      FeedbackFunctionId g) {
  if (!g_is_linear(g))
    throw config_error("shortening forgery requires a linear feedback function");
  const std::size_t t = c.blocks.size();
  if (j < 1 || k < 1) throw bounds_error("need j >= 1 and k >= 1");
  if (j + 2ull * k + 1 > t)
    throw bounds_error("need j + 2k + 1 <= t (j=" + std::to_string(j) + ", k=" +
                       std::to_string(k) + ", t=" + std::to_string(t) + ")");
  if (known_even_plaintexts.size() != k)
    throw bounds_error("expected k known plaintext blocks P_{j+2}, ..., P_{j+2k}");

  const BlockWidth w = c.blocks[0].width();
  Block delta = Block::zeros(w);
  for (unsigned i = 1; i <= k; ++i)
    delta ^= g_pow(g, k - i, c.blocks[j + 2 * i - 2] ^ known_even_plaintexts[i - 1]);

  ForgeryPlan plan;
  plan.forged.sequence = c.sequence;
  plan.forged.blocks.reserve(t - 2 * k);
  for (std::size_t i = 1; i <= j; ++i) plan.forged.blocks.push_back(c.blocks[i - 1]);
  plan.forged.blocks.push_back(c.blocks[j + 2 * k] ^ g_apply(g, delta));
  for (std::size_t i = j + 2ull * k + 2; i <= t; ++i) plan.forged.blocks.push_back(c.blocks[i - 1]);

  for (unsigned i = 1; i <= k; ++i)
    plan.knowledge.known_plaintext_positions.push_back(j + 2 * i);
  plan.knowledge.notes = {"self-splice u=j+1, v=j+2k+1 via the iterated chaining identity"};
  if (g == FeedbackFunctionId::IobcRotation) {
    plan.predicted = SuccessPrediction::power_of_two(
        fixed_point_log2_fraction(iobc_position_permutation(w), k));
  } else {
    plan.predicted = SuccessPrediction::certain();  // identity feedback: g^k always fixes G_j
  }
  return plan;
}

/// IV-reuse forgery: two messages sealed under identical (F_0, G_0) and one
/// known plaintext block in position 2 of each. For linear g,
///   C'_1, C'_2, C_3 xor g(C_1 xor C'_1 xor P_2 xor P'_2), C_4..C_t
/// decrypts to P'_1, P'_2, garbled, P_4..P_t and is always accepted.
inline ForgeryPlan forge_iv_reuse(const SequencedCiphertext& c, const SequencedCiphertext& c_prime,
                                  const Block& p2, const Block& p2_prime, FeedbackFunctionId g) {
  if (!g_is_linear(g))
    throw config_error("IV-reuse forgery requires a linear feedback function");
  const std::size_t t = c.blocks.size(), t_prime = c_prime.blocks.size();
  if (t < 4) throw bounds_error("need t >= 4");
  if (t_prime < 3) throw bounds_error("need t' >= 3");
  if (c.sequence.has_value() != c_prime.sequence.has_value() ||
      (c.sequence && *c.sequence != *c_prime.sequence))
    throw config_error("IV reuse requires both ciphertexts under the same IVs");

  const Block correction = g_apply(g, c.blocks[0] ^ c_prime.blocks[0] ^ p2 ^ p2_prime);

  ForgeryPlan plan;
  plan.forged.sequence = c_prime.sequence;
  plan.forged.blocks.reserve(t);
  plan.forged.blocks.push_back(c_prime.blocks[0]);
  plan.forged.blocks.push_back(c_prime.blocks[1]);
  plan.forged.blocks.push_back(c.blocks[2] ^ correction);
  for (std::size_t i = 4; i <= t; ++i) plan.forged.blocks.push_back(c.blocks[i - 1]);

  plan.knowledge.known_plaintext_positions = {2};
  plan.knowledge.notes = {"both messages sealed under identical IVs; linear g distributes over xor"};
  plan.predicted = SuccessPrediction::certain();
  return plan;
}

// ---------------------------------------------------------------------------
// Chosen-plaintext birthday forgery.
// ---------------------------------------------------------------------------

struct BirthdayOutcome {
  bool collision_found = false;
  std::optional<ForgeryPlan> plan;
  std::uint64_t messages_sealed = 0;
  // collision location: (message a, position i) and (message b, position j)
  std::uint64_t msg_a = 0, msg_b = 0;
  unsigned pos_i = 0, pos_j = 0;
};

namespace detail {
struct U128Hash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& v) const {
    return std::hash<std::uint64_t>()(v.first ^ (v.second * 0x9E3779B97F4A7C15ull));
  }
};
}  // namespace detail

/// Drive a seal oracle with chosen messages that plant one fixed block P* at
/// every even position (random filler in between), index the ciphertext
/// blocks at the planted positions, and wait for two different messages to
/// repeat a value there. Such a pair yields the splice
///   C'_1..C'_{j-1}, C_i, C_{i+1}..C_t
/// accepted with probability about one half: the collision is caused either
/// by matching internal state F'_{j-1} = F_{i-1} (then the splice decrypts
/// clean) or by an accidental value match, and the two causes carry about
/// equal probability. The random filler keeps the chain states at distinct
/// planted positions independent; messages made entirely of P* would turn
/// every chain into an iteration of the same single map, letting accidental
/// collisions swamp the matching-state ones. Collisions are only taken
/// across distinct messages.
inline BirthdayOutcome birthday_chosen_plaintext(SealOracle& oracle, const Block& p_star,
                                                 unsigned blocks_per_message, std::uint64_t budget,
                                                 SplitMix64& filler_rng) {
  if (blocks_per_message < 2) throw bounds_error("need at least two blocks per message");
  const BlockWidth w = p_star.width();
  BirthdayOutcome out;

  struct Occurrence {
    std::uint64_t msg;
    unsigned pos;
  };
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, Occurrence, detail::U128Hash> index;
  std::vector<SequencedCiphertext> sealed;
  sealed.reserve(static_cast<std::size_t>(budget));

  std::vector<Block> message;
  for (std::uint64_t m = 0; m < budget; ++m) {
    message.clear();
    for (unsigned pos = 1; pos <= blocks_per_message; ++pos)
      message.push_back(pos % 2 == 0 ? p_star : random_block(w, filler_rng));
    SequencedCiphertext c = oracle.seal(message);
    ++out.messages_sealed;
    const std::size_t t = c.blocks.size();
    // planted interior positions only: the splice needs 1 < pos < t
    for (unsigned pos = 2; pos + 1 <= t; pos += 2) {
      const auto key = std::make_pair(c.blocks[pos - 1].raw().lo, c.blocks[pos - 1].raw().hi);
      auto it = index.find(key);
      if (it == index.end()) continue;

      const SequencedCiphertext& older = sealed[it->second.msg];
      const unsigned i = it->second.pos;  // position in the older message (suffix source)
      const unsigned j = pos;             // position in the current message (prefix source)
      ForgeryPlan plan;
      plan.forged.sequence = c.sequence;
      for (unsigned x = 1; x < j; ++x) plan.forged.blocks.push_back(c.blocks[x - 1]);
      for (std::size_t x = i; x <= older.blocks.size(); ++x)
        plan.forged.blocks.push_back(older.blocks[x - 1]);
      plan.knowledge.chosen_plaintext_queries = out.messages_sealed;
      plan.knowledge.known_plaintext_positions = {i, j};
      plan.knowledge.notes = {"birthday collision of (plaintext, ciphertext) pairs across messages"};
      plan.predicted = {BigRational(1, 2), false};

      out.collision_found = true;
      out.plan = std::move(plan);
      out.msg_a = it->second.msg;
      out.pos_i = i;
      out.msg_b = m;
      out.pos_j = j;
      return out;
    }
    for (unsigned pos = 2; pos + 1 <= t; pos += 2) {
      const auto key = std::make_pair(c.blocks[pos - 1].raw().lo, c.blocks[pos - 1].raw().hi);
      index.emplace(key, Occurrence{m, pos});
    }
    sealed.push_back(std::move(c));
  }
  return out;
}

}  // namespace mdclab
