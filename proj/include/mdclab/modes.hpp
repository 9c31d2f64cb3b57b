#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "mdclab/block.hpp"
#include "mdclab/cipher.hpp"
#include "mdclab/feedback.hpp"
#include "mdclab/rng.hpp"

namespace mdclab {

/// The pair of secret chaining seeds (F_0, G_0).
struct IvPair {
  Block f0;
  Block g0;
};

/// IV derivation from a sequence number under an auxiliary key:
/// F_0 = e_K'(S), G_0 = e_K'(F_0).
inline IvPair derive_ivs(const BlockCipher& aux, const Block& s) {
  if (s.width() != aux.width()) throw width_error("sequence width does not match aux cipher");
  Block f0 = aux.encrypt_block(s);
  Block g0 = aux.encrypt_block(f0);
  return {f0, g0};
}

/// How a mode instance obtains IVs for each sealed message.
///
/// ExplicitSecret holds a fixed pair shared by every seal (this is the "IV
/// reuse" configuration the iv-reuse forgery needs). The fresh variant draws
/// a new secret pair per seal and rolls the verifier-visible pair forward
/// with it, modelling sender/receiver with synchronized secret IV state.
/// DerivedFromSequence issues a strictly increasing sequence number per seal
/// and derives the pair from it; the sequence rides with the ciphertext.
class IvPolicy {
 public:
  enum class Kind { ExplicitSecret, DerivedFromSequence };

  static IvPolicy explicit_secret(IvPair pair) {
    require_distinct(pair);
    IvPolicy p(Kind::ExplicitSecret);
    p.state_->pair = std::move(pair);
    p.state_->fresh_per_seal = false;
    return p;
  }

  static IvPolicy fresh_explicit(std::uint64_t seed) {
    IvPolicy p(Kind::ExplicitSecret);
    p.state_->fresh_per_seal = true;
    p.state_->rng.emplace(seed);
    return p;
  }

  static IvPolicy derived_from_sequence(CipherPtr aux, std::uint64_t first_sequence = 0) {
    if (!aux) throw config_error("derived IV policy requires an auxiliary cipher");
    IvPolicy p(Kind::DerivedFromSequence);
    p.state_->aux = std::move(aux);
    p.state_->next_sequence.store(first_sequence);
    return p;
  }

  Kind kind() const { return kind_; }
  bool fresh_per_seal() const { return state_->fresh_per_seal; }
  const CipherPtr& aux_cipher() const { return state_->aux; }

  /// The pair an explicit-policy verifier currently holds.
  IvPair current_pair() const {
    std::lock_guard lock(state_->mutex);
    if (!state_->pair) throw config_error("no explicit IV pair established yet");
    return *state_->pair;
  }

 private:
  friend class ModeInstance;

  explicit IvPolicy(Kind k) : kind_(k), state_(std::make_shared<State>()) {}

  static void require_distinct(const IvPair& pair) {
    if (pair.f0.width() != pair.g0.width()) throw width_error("IV pair widths differ");
    if (pair.f0 == pair.g0) throw config_error("explicit IVs must be distinct (F_0 != G_0)");
  }

  struct State {
    mutable std::mutex mutex;
    std::optional<IvPair> pair;
    bool fresh_per_seal = false;
    std::optional<SplitMix64> rng;
    CipherPtr aux;
    std::atomic<std::uint64_t> next_sequence{0};
  };

  Kind kind_;
  std::shared_ptr<State> state_;
};

/// Ciphertext plus the sequence number it was encrypted under, when the IV
/// policy derives IVs from sequence numbers.
struct SequencedCiphertext {
  std::optional<Block> sequence;
  std::vector<Block> blocks;
};

/// The internal chains F_0..F_t and G_0..G_t captured while running the
/// chaining equations. Never transmitted; consumed by oracle-grade attacks
/// and by the property tests.
struct EncryptionTrace {
  std::vector<Block> f;
  std::vector<Block> g;
};

struct EncryptResult {
  std::vector<Block> ciphertext;
  EncryptionTrace trace;
};

struct DecryptResult {
  std::vector<Block> plaintext;
  EncryptionTrace trace;
};

struct VerifyResult {
  bool accepted = false;
  std::vector<Block> message;  // filled on accept, MDC block stripped
};

/// One configured mode: feedback function + key-bound cipher + IV policy +
/// optional message-length limit + MDC value.
class ModeInstance {
 public:
  ModeInstance(FeedbackFunctionId g, CipherPtr cipher, IvPolicy policy,
               std::optional<std::uint64_t> max_blocks, Block mdc)
      : g_(g),
        cipher_(std::move(cipher)),
        policy_(std::move(policy)),
        max_blocks_(max_blocks),
        mdc_(std::move(mdc)) {
    if (!cipher_) throw config_error("mode requires a cipher");
    if (mdc_.width() != cipher_->width()) throw width_error("MDC width does not match cipher");
    if (g_ == FeedbackFunctionId::IobcRotation) detail::require_iobc_width(cipher_->width());
  }

  static ModeInstance pes_pcbc(CipherPtr cipher, IvPolicy policy,
                               std::optional<Block> mdc = std::nullopt) {
    return with_defaults(FeedbackFunctionId::Identity, std::move(cipher), std::move(policy),
                         std::nullopt, std::move(mdc));
  }

  /// IOBC pins the message-length limit t <= n^2/2 - 1.
  static ModeInstance iobc(CipherPtr cipher, IvPolicy policy,
                           std::optional<Block> mdc = std::nullopt) {
    const std::uint64_t n = cipher ? cipher->width().bits() : 0;
    return with_defaults(FeedbackFunctionId::IobcRotation, std::move(cipher), std::move(policy),
                         n * n / 2 - 1, std::move(mdc));
  }

  static ModeInstance epbc(CipherPtr cipher, IvPolicy policy,
                           std::optional<Block> mdc = std::nullopt) {
    return with_defaults(FeedbackFunctionId::EpbcBoolean, std::move(cipher), std::move(policy),
                         std::nullopt, std::move(mdc));
  }

  FeedbackFunctionId feedback() const { return g_; }
  const BlockCipher& cipher() const { return *cipher_; }
  BlockWidth width() const { return cipher_->width(); }
  const IvPolicy& policy() const { return policy_; }
  const Block& mdc() const { return mdc_; }
  std::optional<std::uint64_t> max_blocks() const { return max_blocks_; }

  /// Container mode byte: 0 = PES-PCBC, 1 = IOBC, 2 = EPBC.
  std::uint8_t mode_id() const { return static_cast<std::uint8_t>(g_); }

  struct SealRecord {
    SequencedCiphertext ciphertext;
    IvPair ivs;
    std::vector<Block> plaintext;  // message blocks followed by the MDC
    EncryptionTrace trace;
  };

  SealRecord seal_traced(std::span<const Block> message);
  SequencedCiphertext seal(std::span<const Block> message) {
    return seal_traced(message).ciphertext;
  }

  VerifyResult open_verify(const SequencedCiphertext& c) const;

  /// Resolve the IVs open_verify would use for this ciphertext.
  IvPair ivs_for(const SequencedCiphertext& c) const;

 private:
  static ModeInstance with_defaults(FeedbackFunctionId g, CipherPtr cipher, IvPolicy policy,
                                    std::optional<std::uint64_t> max_blocks,
                                    std::optional<Block> mdc) {
    if (!cipher) throw config_error("mode requires a cipher");
    Block m = mdc ? std::move(*mdc) : Block::zeros(cipher->width());
    return ModeInstance(g, std::move(cipher), std::move(policy), max_blocks, std::move(m));
  }

  FeedbackFunctionId g_;
  CipherPtr cipher_;
  IvPolicy policy_;
  std::optional<std::uint64_t> max_blocks_;
  Block mdc_;
};

/// The generic chaining equations:
///   G_i = P_i xor F_{i-1}
///   F_i = e_K(G_i)
///   C_1 = F_1 xor G_0,  C_i = F_i xor g(G_{i-1}) for i >= 2.
/// The first block always mixes raw G_0: g enters only from i = 2.
inline EncryptResult encrypt_blocks(const ModeInstance& m, const IvPair& ivs,
                                    std::span<const Block> p) {
  const BlockWidth w = m.width();
  if (p.empty()) throw bounds_error("encrypt_blocks: need at least one block");
  if (m.max_blocks() && p.size() > *m.max_blocks())
    throw capacity_error("message of " + std::to_string(p.size()) +
                         " blocks exceeds the mode limit of " + std::to_string(*m.max_blocks()));
  if (ivs.f0.width() != w || ivs.g0.width() != w) throw width_error("IV width mismatch");

  EncryptResult out;
  out.trace.f.reserve(p.size() + 1);
  out.trace.g.reserve(p.size() + 1);
  out.trace.f.push_back(ivs.f0);
  out.trace.g.push_back(ivs.g0);
  out.ciphertext.reserve(p.size());
  for (std::size_t i = 1; i <= p.size(); ++i) {
    Block gi = p[i - 1] ^ out.trace.f[i - 1];
    Block fi = m.cipher().encrypt_block(gi);
    Block feedback = (i == 1) ? out.trace.g[0] : g_apply(m.feedback(), out.trace.g[i - 1]);
    out.ciphertext.push_back(fi ^ feedback);
    out.trace.g.push_back(std::move(gi));
    out.trace.f.push_back(std::move(fi));
  }
  return out;
}

/// Inverse of encrypt_blocks:
///   F_1 = C_1 xor G_0,  F_i = C_i xor g(G_{i-1}) for i >= 2
///   G_i = d_K(F_i)
///   P_i = G_i xor F_{i-1}.
/// No length limit is enforced here: the limit constrains message creation,
/// and several forgeries hand the receiver ciphertexts longer than the
/// original message.
inline DecryptResult decrypt_blocks(const ModeInstance& m, const IvPair& ivs,
                                    std::span<const Block> c) {
  const BlockWidth w = m.width();
  if (c.empty()) throw bounds_error("decrypt_blocks: need at least one block");
  if (ivs.f0.width() != w || ivs.g0.width() != w) throw width_error("IV width mismatch");

  DecryptResult out;
  out.trace.f.reserve(c.size() + 1);
  out.trace.g.reserve(c.size() + 1);
  out.trace.f.push_back(ivs.f0);
  out.trace.g.push_back(ivs.g0);
  out.plaintext.reserve(c.size());
  for (std::size_t i = 1; i <= c.size(); ++i) {
    if (c[i - 1].width() != w) throw width_error("ciphertext block width mismatch");
    Block feedback = (i == 1) ? out.trace.g[0] : g_apply(m.feedback(), out.trace.g[i - 1]);
    Block fi = c[i - 1] ^ feedback;
    Block gi = m.cipher().decrypt_block(fi);
    out.plaintext.push_back(gi ^ out.trace.f[i - 1]);
    out.trace.f.push_back(std::move(fi));
    out.trace.g.push_back(std::move(gi));
  }
  return out;
}

inline ModeInstance::SealRecord ModeInstance::seal_traced(std::span<const Block> message) {
  if (max_blocks_ && message.size() + 1 > *max_blocks_)
    throw capacity_error("message plus MDC exceeds the mode limit of " +
                         std::to_string(*max_blocks_) + " blocks");

  std::optional<IvPair> ivs;
  std::optional<Block> sequence;
  auto& st = *policy_.state_;
  if (policy_.kind() == IvPolicy::Kind::DerivedFromSequence) {
    if (st.aux->width() != width()) throw width_error("aux cipher width does not match mode");
    const std::uint64_t seq = st.next_sequence.fetch_add(1);
    if (width().bits() < 64 && seq >= (1ull << width().bits()))
      throw capacity_error("sequence-number space exhausted");
    sequence = Block::from_u64(width(), seq);
    ivs = derive_ivs(*st.aux, *sequence);
  } else {
    std::lock_guard lock(st.mutex);
    if (st.fresh_per_seal) {
      Block f0 = random_block(width(), *st.rng);
      Block g0 = random_block(width(), *st.rng);
      while (g0 == f0) g0 = random_block(width(), *st.rng);
      st.pair = IvPair{std::move(f0), std::move(g0)};
    }
    if (!st.pair) throw config_error("explicit IV policy has no pair");
    ivs = *st.pair;
  }

  std::vector<Block> plaintext(message.begin(), message.end());
  plaintext.push_back(mdc_);
  EncryptResult enc = encrypt_blocks(*this, *ivs, plaintext);

  SealRecord rec{SequencedCiphertext{std::move(sequence), std::move(enc.ciphertext)},
                 std::move(*ivs), std::move(plaintext), std::move(enc.trace)};
  return rec;
}

inline IvPair ModeInstance::ivs_for(const SequencedCiphertext& c) const {
  const auto& st = *policy_.state_;
  if (policy_.kind() == IvPolicy::Kind::DerivedFromSequence) {
    if (!c.sequence) throw format_error("ciphertext lacks the sequence number this mode requires");
    if (st.aux->width() != width()) throw width_error("aux cipher width does not match mode");
    return derive_ivs(*st.aux, *c.sequence);
  }
  if (c.sequence) throw format_error("ciphertext carries a sequence number but the IV policy is explicit");
  return policy_.current_pair();
}

inline VerifyResult ModeInstance::open_verify(const SequencedCiphertext& c) const {
  if (c.blocks.empty()) throw format_error("ciphertext must contain at least one block");
  IvPair ivs = ivs_for(c);
  DecryptResult dec = decrypt_blocks(*this, ivs, c.blocks);
  VerifyResult out;
  out.accepted = dec.plaintext.back() == mdc_;
  if (out.accepted) {
    dec.plaintext.pop_back();
    out.message = std::move(dec.plaintext);
  }
  return out;
}

}  // namespace mdclab
