#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "mdclab/attacks.hpp"
#include "mdclab/cipher.hpp"
#include "mdclab/rng.hpp"

using namespace mdclab;

namespace {

IvPair random_ivs(BlockWidth w, SplitMix64& rng) {
  Block f0 = random_block(w, rng);
  Block g0 = random_block(w, rng);
  while (g0 == f0) g0 = random_block(w, rng);
  return {f0, g0};
}

std::vector<Block> random_message(BlockWidth w, unsigned count, SplitMix64& rng) {
  std::vector<Block> out;
  for (unsigned i = 0; i < count; ++i) out.push_back(random_block(w, rng));
  return out;
}

ModeInstance make_mode(FeedbackFunctionId g, CipherPtr cipher, IvPolicy policy,
                       std::optional<Block> mdc = std::nullopt) {
  switch (g) {
    case FeedbackFunctionId::Identity: return ModeInstance::pes_pcbc(cipher, policy, mdc);
    case FeedbackFunctionId::IobcRotation: return ModeInstance::iobc(cipher, policy, mdc);
    case FeedbackFunctionId::EpbcBoolean: return ModeInstance::epbc(cipher, policy, mdc);
  }
  throw config_error("unreachable");
}

const std::array<FeedbackFunctionId, 3> kAllModes = {FeedbackFunctionId::Identity,
                                                     FeedbackFunctionId::IobcRotation,
                                                     FeedbackFunctionId::EpbcBoolean};

}  // namespace

TEST_CASE("pes insertion forgery structure and acceptance") {
  SplitMix64 rng(41);
  const BlockWidth w(8);
  auto cipher = ideal_cipher(4100, w);
  for (int trial = 0; trial < 200; ++trial) {
    IvPair ivs = random_ivs(w, rng);
    Block mdc = random_block(w, rng);
    auto inst = ModeInstance::pes_pcbc(cipher, IvPolicy::explicit_secret(ivs), mdc);
    auto rec = inst.seal_traced(random_message(w, 7, rng));
    const unsigned t = static_cast<unsigned>(rec.ciphertext.blocks.size());
    const unsigned j = 2 + static_cast<unsigned>(rng.next_below(t - 2));

    ForgeryPlan plan = forge_pes_insert(rec.ciphertext, j, rec.plaintext[j - 1]);
    REQUIRE(plan.forged.blocks.size() == t + 2);
    REQUIRE(plan.forged.blocks[j] == rec.plaintext[j - 1]);
    REQUIRE(plan.forged.blocks[j + 1] == rec.ciphertext.blocks[j - 1]);
    REQUIRE(plan.predicted.value() == 1.0);

    // accepted, and the recovered block after the insertion equals C_j
    auto dec = decrypt_blocks(inst, ivs, plan.forged.blocks);
    REQUIRE(dec.plaintext.back() == mdc);
    REQUIRE(dec.plaintext[j] == rec.ciphertext.blocks[j - 1]);
    REQUIRE(inst.open_verify(plan.forged).accepted);
  }
}

TEST_CASE("pes insertion forgery index bounds") {
  SplitMix64 rng(42);
  const BlockWidth w(8);
  auto cipher = ideal_cipher(4200, w);
  IvPair ivs = random_ivs(w, rng);
  auto inst = ModeInstance::pes_pcbc(cipher, IvPolicy::explicit_secret(ivs));
  auto rec = inst.seal_traced(random_message(w, 4, rng));
  const Block p = rec.plaintext[0];
  REQUIRE_THROWS_AS(forge_pes_insert(rec.ciphertext, 1, p), bounds_error);
  REQUIRE_THROWS_AS(forge_pes_insert(rec.ciphertext, 5, p), bounds_error);  // t = 5
  REQUIRE_NOTHROW(forge_pes_insert(rec.ciphertext, 4, p));
}

TEST_CASE("general insertion with identity feedback and delta 0 is the pes forgery") {
  SplitMix64 rng(43);
  const BlockWidth w(8);
  auto cipher = ideal_cipher(4300, w);
  IvPair ivs = random_ivs(w, rng);
  auto inst = ModeInstance::pes_pcbc(cipher, IvPolicy::explicit_secret(ivs));
  auto rec = inst.seal_traced(random_message(w, 9, rng));
  ForgeryPlan a = forge_pes_insert(rec.ciphertext, 4, rec.plaintext[3]);
  ForgeryPlan b = forge_general_insert(rec.ciphertext, 4, rec.plaintext[3], Block::zeros(w));
  REQUIRE(a.forged.blocks == b.forged.blocks);
}

TEST_CASE("general insertion with the oracle delta is always accepted") {
  SplitMix64 rng(44);
  for (unsigned n : {8u, 16u}) {
    const BlockWidth w(n);
    auto cipher = ideal_cipher(4400 + n, w);
    for (FeedbackFunctionId g : kAllModes) {
      for (int trial = 0; trial < 100; ++trial) {
        IvPair ivs = random_ivs(w, rng);
        Block mdc = random_block(w, rng);
        auto inst = make_mode(g, cipher, IvPolicy::explicit_secret(ivs), mdc);
        auto rec = inst.seal_traced(random_message(w, 8, rng));
        const unsigned t = static_cast<unsigned>(rec.ciphertext.blocks.size());
        const unsigned j = 2 + static_cast<unsigned>(rng.next_below(t - 2));
        Block delta = rec.trace.g[j] ^ g_apply(g, rec.trace.g[j]);
        ForgeryPlan plan = forge_general_insert(rec.ciphertext, j, rec.plaintext[j - 1], delta);
        REQUIRE(inst.open_verify(plan.forged).accepted);
      }
    }
  }
}

TEST_CASE("general insertion internal equalities: F'_{j+1} = F_{j-1}, G'_{j+2} = G_j") {
  SplitMix64 rng(45);
  const BlockWidth w(8);
  auto cipher = ideal_cipher(4500, w);
  for (FeedbackFunctionId g : kAllModes) {
    IvPair ivs = random_ivs(w, rng);
    auto inst = make_mode(g, cipher, IvPolicy::explicit_secret(ivs));
    auto rec = inst.seal_traced(random_message(w, 9, rng));
    const unsigned t = static_cast<unsigned>(rec.ciphertext.blocks.size());
    for (unsigned j = 2; j < t; ++j) {
      Block delta = rec.trace.g[j] ^ g_apply(g, rec.trace.g[j]);
      ForgeryPlan plan = forge_general_insert(rec.ciphertext, j, rec.plaintext[j - 1], delta);
      auto dec = decrypt_blocks(inst, ivs, plan.forged.blocks);
      REQUIRE(dec.trace.f[j + 1] == rec.trace.f[j - 1]);
      REQUIRE(dec.trace.g[j + 2] == rec.trace.g[j]);
      REQUIRE(dec.plaintext.back() == rec.plaintext.back());
    }
  }
}

TEST_CASE("general insertion with a wrong delta: baseline for bijective feedback") {
  SplitMix64 rng(46);
  const BlockWidth w(8);
  auto cipher = ideal_cipher(4600, w);
  for (FeedbackFunctionId g :
       {FeedbackFunctionId::Identity, FeedbackFunctionId::IobcRotation}) {
    int accepted = 0;
    const int trials = 3000;
    for (int trial = 0; trial < trials; ++trial) {
      IvPair ivs = random_ivs(w, rng);
      auto inst = make_mode(g, cipher, IvPolicy::explicit_secret(ivs));
      auto rec = inst.seal_traced(random_message(w, 8, rng));
      Block delta = random_block(w, rng);
      ForgeryPlan plan = forge_general_insert(rec.ciphertext, 4, rec.plaintext[3], delta);
      if (inst.open_verify(plan.forged).accepted) ++accepted;
    }
    REQUIRE(accepted <= trials / 50);  // about trials * 2^-8
  }
}

TEST_CASE("general insertion with a wrong delta: epbc resynchronizes more often") {
  // The epbc mixer is not injective, so after a wrong insertion the chains
  // can fall back into step whenever g(G'_{i}) = g(G_{i-2}) with unequal
  // arguments; per position that collision has probability 3/8, so each
  // step resynchronizes with chance (3/8)^{n/2} (about 2% at n=8). The
  // acceptance rate is therefore far above 2^-n at small widths.
  SplitMix64 rng(66);
  const BlockWidth w(8);
  auto cipher = ideal_cipher(4660, w);
  int accepted = 0;
  const int trials = 3000;
  for (int trial = 0; trial < trials; ++trial) {
    IvPair ivs = random_ivs(w, rng);
    auto inst = ModeInstance::epbc(cipher, IvPolicy::explicit_secret(ivs));
    auto rec = inst.seal_traced(random_message(w, 8, rng));
    Block delta = random_block(w, rng);
    ForgeryPlan plan = forge_general_insert(rec.ciphertext, 4, rec.plaintext[3], delta);
    if (inst.open_verify(plan.forged).accepted) ++accepted;
  }
  const double rate = accepted / double(trials);
  REQUIRE(rate > 0.02);
  REQUIRE(rate < 0.20);
}

TEST_CASE("epbc delta candidates: order, structure, counts") {
  const BlockWidth w(16);
  EpbcDeltaCandidates cands(w, 2);
  std::vector<Block> all;
  for (std::optional<Block> d = cands.next(); d; d = cands.next()) all.push_back(*d);
  REQUIRE(all.size() == 37);  // 1 + 8 + 28

  // first candidate is H = 0: delta = 0^8 || 1^8
  REQUIRE(all[0].to_hex() == "00ff");

  // halves complementary, weights nondecreasing, lexicographic within weight
  unsigned prev_weight = 0;
  std::uint64_t prev_value = 0;
  std::set<std::string> distinct;
  for (const Block& d : all) {
    std::uint64_t h = 0;
    unsigned weight = 0;
    for (unsigned i = 1; i <= 8; ++i) {
      REQUIRE(d.bit(i) == !d.bit(8 + i));
      h = (h << 1) | (d.bit(i) ? 1 : 0);
      weight += d.bit(i) ? 1 : 0;
    }
    REQUIRE(weight >= prev_weight);
    if (weight == prev_weight && &d != &all[0]) REQUIRE(h > prev_value);
    prev_weight = weight;
    prev_value = h;
    distinct.insert(d.to_hex());
  }
  REQUIRE(distinct.size() == 37);

  // counts match the exact binomial sums
  REQUIRE(EpbcDeltaCandidates::count(w, 2) == BigInt(37));
  REQUIRE(EpbcDeltaCandidates::count(BlockWidth(64), 8) == BigInt(15033173));
  REQUIRE(EpbcDeltaCandidates::default_weight_limit(BlockWidth(64)) == 8);
  REQUIRE_THROWS_AS(EpbcDeltaCandidates::default_weight_limit(BlockWidth(12)), width_error);
}

TEST_CASE("epbc delta candidate enumeration matches the count across limits") {
  for (unsigned n : {8u, 16u}) {
    const BlockWidth w(n);
    for (unsigned limit = 0; limit <= n / 2; ++limit) {
      EpbcDeltaCandidates cands(w, limit);
      std::uint64_t count = 0;
      while (cands.next()) ++count;
      REQUIRE(BigInt(count) == EpbcDeltaCandidates::count(w, limit));
    }
  }
}

TEST_CASE("epbc delta candidates at the 128-bit word boundary") {
  // the guessed half is a full 64-bit word here
  const BlockWidth w(128);
  EpbcDeltaCandidates cands(w, 1);
  std::uint64_t count = 0;
  for (std::optional<Block> d = cands.next(); d; d = cands.next()) {
    ++count;
    for (unsigned i = 1; i <= 64; ++i) REQUIRE(d->bit(i) == !d->bit(64 + i));
  }
  REQUIRE(count == 65);  // H = 0 plus the 64 weight-one values
}

TEST_CASE("epbc guess probability matches exhaustive enumeration at n=16") {
  // Independent oracle: enumerate all 2^16 values of G_j and count those
  // whose delta has left-half weight <= 2.
  const BlockWidth w(16);
  unsigned within = 0;
  for (std::uint32_t v = 0; v < (1u << 16); ++v) {
    Block x = Block::from_u64(w, v);
    Block d = x ^ g_epbc(x);
    unsigned weight = 0;
    for (unsigned i = 1; i <= 8; ++i) weight += d.bit(i) ? 1 : 0;
    if (weight <= 2) ++within;
  }
  REQUIRE(within == 44469);
  SuccessPrediction pred = epbc_guess_success_probability(w, 2);
  REQUIRE(pred.probability == BigRational(44469, 65536));
  REQUIRE(pred.exact);
}

TEST_CASE("epbc guess forgery succeeds exactly when enumeration covers the true delta") {
  SplitMix64 rng(47);
  const BlockWidth w(16);
  auto cipher = ideal_cipher(4700, w);
  int conditioned = 0, conditioned_success = 0;
  for (int trial = 0; trial < 300; ++trial) {
    IvPair ivs = random_ivs(w, rng);
    auto inst = ModeInstance::epbc(cipher, IvPolicy::explicit_secret(ivs));
    auto rec = inst.seal_traced(random_message(w, 8, rng));
    const unsigned j = 4;
    Block true_delta = rec.trace.g[j] ^ g_epbc(rec.trace.g[j]);
    unsigned weight = 0;
    for (unsigned i = 1; i <= 8; ++i) weight += true_delta.bit(i) ? 1 : 0;

    VerifierOracle oracle(inst);
    GuessOutcome out = epbc_guess_forgery(rec.ciphertext, j, rec.plaintext[j - 1], oracle, 2,
                                          1u << 20);
    REQUIRE(out.trials_used <= 37);
    REQUIRE(out.trials_used == oracle.queries());
    if (weight <= 2) {
      ++conditioned;
      REQUIRE(out.success);
      ++conditioned_success;
      REQUIRE(out.plan.has_value());
      REQUIRE(inst.open_verify(out.plan->forged).accepted);
    }
  }
  REQUIRE(conditioned > 100);  // ~68% of 300
  REQUIRE(conditioned == conditioned_success);
}

TEST_CASE("epbc guess respects the trial budget") {
  SplitMix64 rng(48);
  const BlockWidth w(16);
  auto cipher = ideal_cipher(4800, w);
  IvPair ivs = random_ivs(w, rng);
  auto inst = ModeInstance::epbc(cipher, IvPolicy::explicit_secret(ivs));
  auto rec = inst.seal_traced(random_message(w, 8, rng));
  VerifierOracle oracle(inst);
  GuessOutcome out = epbc_guess_forgery(rec.ciphertext, 4, rec.plaintext[3], oracle, 2, 3);
  REQUIRE(out.trials_used <= 3);
}

TEST_CASE("splice with the oracle correction is always accepted") {
  SplitMix64 rng(49);
  const BlockWidth w(8);
  auto cipher = ideal_cipher(4900, w);
  auto aux = ideal_cipher(4901, w);
  for (FeedbackFunctionId g : kAllModes) {
    for (int trial = 0; trial < 100; ++trial) {
      IvPolicy policy = g == FeedbackFunctionId::IobcRotation
                            ? IvPolicy::derived_from_sequence(aux, rng.next_below(100))
                            : IvPolicy::explicit_secret(random_ivs(w, rng));
      Block mdc = random_block(w, rng);
      auto inst = make_mode(g, cipher, policy, mdc);
      auto rec_c = inst.seal_traced(random_message(w, 9, rng));
      auto rec_cp = inst.seal_traced(random_message(w, 7, rng));
      const unsigned t = static_cast<unsigned>(rec_c.ciphertext.blocks.size());
      const unsigned tp = static_cast<unsigned>(rec_cp.ciphertext.blocks.size());
      const unsigned u = 2 + static_cast<unsigned>(rng.next_below(tp - 2));
      const unsigned v = 2 + static_cast<unsigned>(rng.next_below(t - 2));
      Block correction =
          g_apply(g, rec_cp.trace.g[u - 1]) ^ g_apply(g, rec_c.trace.g[v - 1]);
      ForgeryPlan plan = forge_splice(rec_c.ciphertext, rec_cp.ciphertext, u, v, correction);
      REQUIRE(plan.forged.blocks.size() == t - v + u);

      VerifyResult res = inst.open_verify(plan.forged);
      REQUIRE(res.accepted);
      // recovered plaintext pattern: primed prefix, garbled u, original tail
      IvPair ivs = inst.ivs_for(plan.forged);
      auto dec = decrypt_blocks(inst, ivs, plan.forged.blocks);
      for (unsigned i = 1; i < u; ++i) REQUIRE(dec.plaintext[i - 1] == rec_cp.plaintext[i - 1]);
      REQUIRE(dec.plaintext[u - 1] ==
              (rec_c.plaintext[v - 1] ^ rec_cp.trace.f[u - 1] ^ rec_c.trace.f[v - 1]));
      for (unsigned i = v + 1; i <= t; ++i)
        REQUIRE(dec.plaintext[u + i - v - 1] == rec_c.plaintext[i - 1]);
    }
  }
}

TEST_CASE("degenerate splice reproduces the original ciphertext") {
  SplitMix64 rng(50);
  const BlockWidth w(8);
  auto cipher = ideal_cipher(5000, w);
  IvPair ivs = random_ivs(w, rng);
  auto inst = ModeInstance::epbc(cipher, IvPolicy::explicit_secret(ivs));
  auto rec = inst.seal_traced(random_message(w, 6, rng));
  ForgeryPlan plan =
      forge_splice(rec.ciphertext, rec.ciphertext, 3, 3, Block::zeros(w));
  REQUIRE(plan.forged.blocks == rec.ciphertext.blocks);
  REQUIRE(inst.open_verify(plan.forged).accepted);
}

TEST_CASE("splice index bounds") {
  SplitMix64 rng(51);
  const BlockWidth w(8);
  auto cipher = ideal_cipher(5100, w);
  IvPair ivs = random_ivs(w, rng);
  auto inst = ModeInstance::epbc(cipher, IvPolicy::explicit_secret(ivs));
  auto rec = inst.seal_traced(random_message(w, 5, rng));  // t = 6
  const Block z = Block::zeros(w);
  REQUIRE_THROWS_AS(forge_splice(rec.ciphertext, rec.ciphertext, 1, 3, z), bounds_error);
  REQUIRE_THROWS_AS(forge_splice(rec.ciphertext, rec.ciphertext, 6, 3, z), bounds_error);
  REQUIRE_THROWS_AS(forge_splice(rec.ciphertext, rec.ciphertext, 3, 1, z), bounds_error);
  REQUIRE_THROWS_AS(forge_splice(rec.ciphertext, rec.ciphertext, 3, 6, z), bounds_error);
}

TEST_CASE("iobc shortening forgery: construction, length, and conditional success") {
  SplitMix64 rng(52);
  const BlockWidth w(8);
  auto cipher = ideal_cipher(5200, w);
  auto aux = ideal_cipher(5201, w);
  int fixed_point_runs = 0;
  for (int trial = 0; trial < 400; ++trial) {
    auto inst = ModeInstance::iobc(cipher, IvPolicy::derived_from_sequence(aux, 0),
                                   random_block(w, rng));
    auto rec = inst.seal_traced(random_message(w, 12, rng));  // t = 13
    const unsigned j = 1, k = 5;
    std::vector<Block> known;
    for (unsigned i = 1; i <= k; ++i) known.push_back(rec.plaintext[j + 2 * i - 1]);
    ForgeryPlan plan =
        forge_iobc_shorten(rec.ciphertext, j, k, known, FeedbackFunctionId::IobcRotation);
    REQUIRE(plan.forged.blocks.size() == 13 - 2 * k);
    REQUIRE(plan.predicted.probability == BigRational(1, 4));

    const bool fixed_point =
        g_pow(FeedbackFunctionId::IobcRotation, k, rec.trace.g[j]) == rec.trace.g[j];
    const bool accepted = inst.open_verify(plan.forged).accepted;
    if (fixed_point) {
      ++fixed_point_runs;
      REQUIRE(accepted);  // exact correction when g^k fixes G_j
    }
  }
  REQUIRE(fixed_point_runs > 50);  // ~25% of 400
}

TEST_CASE("iobc shortening forgery predictions for the paper parameters") {
  SplitMix64 rng(53);
  // n=64 needs a wide cipher: feistel
  std::array<std::uint8_t, 16> key{};
  for (unsigned i = 0; i < 16; ++i) key[i] = static_cast<std::uint8_t>(i * 7 + 1);
  const BlockWidth w(64);
  auto cipher = feistel_cipher(key, w);
  auto aux = feistel_cipher(key, w, 18);
  auto inst = ModeInstance::iobc(cipher, IvPolicy::derived_from_sequence(aux, 0));
  REQUIRE(inst.max_blocks() == 2047);

  const unsigned t = 685, j = 1, k = 341;
  auto rec = inst.seal_traced(random_message(w, t - 1, rng));
  std::vector<Block> known;
  for (unsigned i = 1; i <= k; ++i) known.push_back(rec.plaintext[j + 2 * i - 1]);
  ForgeryPlan plan =
      forge_iobc_shorten(rec.ciphertext, j, k, known, FeedbackFunctionId::IobcRotation);
  REQUIRE(plan.forged.blocks.size() == t - 2 * k);
  REQUIRE(plan.predicted.log2() == Catch::Approx(-22.0));

  // k=3 at n=8: fraction 2^-4 from the cycle structure
  REQUIRE(fixed_point_log2_fraction(iobc_position_permutation(BlockWidth(8)), 3) == -4);
}

TEST_CASE("iobc shortening rejects bad parameters and nonlinear feedback") {
  SplitMix64 rng(54);
  const BlockWidth w(8);
  auto cipher = ideal_cipher(5400, w);
  auto aux = ideal_cipher(5401, w);
  auto inst = ModeInstance::iobc(cipher, IvPolicy::derived_from_sequence(aux, 0));
  auto rec = inst.seal_traced(random_message(w, 12, rng));
  std::vector<Block> known(5, Block::zeros(w));
  REQUIRE_THROWS_AS(
      forge_iobc_shorten(rec.ciphertext, 1, 5, known, FeedbackFunctionId::EpbcBoolean),
      config_error);
  REQUIRE_THROWS_AS(
      forge_iobc_shorten(rec.ciphertext, 2, 6, known, FeedbackFunctionId::IobcRotation),
      bounds_error);  // j + 2k + 1 > t
  std::vector<Block> short_known(4, Block::zeros(w));
  REQUIRE_THROWS_AS(
      forge_iobc_shorten(rec.ciphertext, 1, 5, short_known, FeedbackFunctionId::IobcRotation),
      bounds_error);
}

TEST_CASE("iv-reuse forgery is always accepted under reused IVs") {
  SplitMix64 rng(55);
  for (unsigned n : {8u, 16u}) {
    const BlockWidth w(n);
    auto cipher = ideal_cipher(5500 + n, w);
    for (FeedbackFunctionId g :
         {FeedbackFunctionId::Identity, FeedbackFunctionId::IobcRotation}) {
      for (int trial = 0; trial < 100; ++trial) {
        IvPair ivs = random_ivs(w, rng);
        Block mdc = random_block(w, rng);
        auto inst = make_mode(g, cipher, IvPolicy::explicit_secret(ivs), mdc);
        auto rec_c = inst.seal_traced(random_message(w, 8, rng));
        auto rec_cp = inst.seal_traced(random_message(w, 6, rng));
        ForgeryPlan plan = forge_iv_reuse(rec_c.ciphertext, rec_cp.ciphertext,
                                          rec_c.plaintext[1], rec_cp.plaintext[1], g);
        REQUIRE(plan.forged.blocks.size() == rec_c.ciphertext.blocks.size());
        VerifyResult res = inst.open_verify(plan.forged);
        REQUIRE(res.accepted);
        // recovered plaintext: P'_1, P'_2, garbled, P_4..P_t
        auto dec = decrypt_blocks(inst, ivs, plan.forged.blocks);
        REQUIRE(dec.plaintext[0] == rec_cp.plaintext[0]);
        REQUIRE(dec.plaintext[1] == rec_cp.plaintext[1]);
        REQUIRE(dec.plaintext[2] ==
                (rec_c.plaintext[2] ^ rec_cp.trace.f[2] ^ rec_c.trace.f[2]));
        for (std::size_t i = 4; i <= rec_c.plaintext.size(); ++i)
          REQUIRE(dec.plaintext[i - 1] == rec_c.plaintext[i - 1]);
      }
    }
  }
}

TEST_CASE("iv-reuse degenerate case: identical messages give back the original") {
  SplitMix64 rng(56);
  const BlockWidth w(8);
  auto cipher = ideal_cipher(5600, w);
  IvPair ivs = random_ivs(w, rng);
  auto inst = ModeInstance::pes_pcbc(cipher, IvPolicy::explicit_secret(ivs));
  auto msg = random_message(w, 5, rng);
  auto rec1 = inst.seal_traced(msg);
  auto rec2 = inst.seal_traced(msg);
  REQUIRE(rec1.ciphertext.blocks == rec2.ciphertext.blocks);  // same IVs, same message
  ForgeryPlan plan = forge_iv_reuse(rec1.ciphertext, rec2.ciphertext, rec1.plaintext[1],
                                    rec2.plaintext[1], FeedbackFunctionId::Identity);
  REQUIRE(plan.forged.blocks == rec1.ciphertext.blocks);
  REQUIRE(inst.open_verify(plan.forged).accepted);
}

TEST_CASE("iv-reuse rejects nonlinear feedback and short messages") {
  SplitMix64 rng(57);
  const BlockWidth w(8);
  auto cipher = ideal_cipher(5700, w);
  IvPair ivs = random_ivs(w, rng);
  auto inst = ModeInstance::pes_pcbc(cipher, IvPolicy::explicit_secret(ivs));
  auto rec_c = inst.seal_traced(random_message(w, 5, rng));
  auto rec_cp = inst.seal_traced(random_message(w, 5, rng));
  REQUIRE_THROWS_AS(forge_iv_reuse(rec_c.ciphertext, rec_cp.ciphertext, rec_c.plaintext[1],
                                   rec_cp.plaintext[1], FeedbackFunctionId::EpbcBoolean),
                    config_error);
  auto rec_short = inst.seal_traced(random_message(w, 2, rng));  // t = 3 < 4
  REQUIRE_THROWS_AS(forge_iv_reuse(rec_short.ciphertext, rec_cp.ciphertext,
                                   rec_short.plaintext[1], rec_cp.plaintext[1],
                                   FeedbackFunctionId::Identity),
                    bounds_error);
}

TEST_CASE("iv-reuse forgery fails under distinct IVs") {
  SplitMix64 rng(58);
  const BlockWidth w(8);
  auto cipher = ideal_cipher(5800, w);
  int accepted = 0;
  const int trials = 2000;
  for (int trial = 0; trial < trials; ++trial) {
    auto inst = ModeInstance::pes_pcbc(cipher, IvPolicy::fresh_explicit(rng.next()));
    auto rec_c = inst.seal_traced(random_message(w, 6, rng));
    auto rec_cp = inst.seal_traced(random_message(w, 6, rng));  // fresh pair, rolls state
    ForgeryPlan plan = forge_iv_reuse(rec_c.ciphertext, rec_cp.ciphertext, rec_c.plaintext[1],
                                      rec_cp.plaintext[1], FeedbackFunctionId::Identity);
    if (inst.open_verify(plan.forged).accepted) ++accepted;
  }
  REQUIRE(accepted <= trials / 50);  // baseline ~2^-8
}

TEST_CASE("birthday attack finds cross-message collisions and emits a splice") {
  SplitMix64 rng(59);
  const BlockWidth w(8);
  auto cipher = ideal_cipher(5900, w);
  auto aux = ideal_cipher(5901, w);
  auto inst = ModeInstance::iobc(cipher, IvPolicy::derived_from_sequence(aux, 0));
  SealOracle oracle(inst);
  const Block p_star = random_block(w, rng);
  BirthdayOutcome out = birthday_chosen_plaintext(oracle, p_star, 10, 60, rng);
  REQUIRE(out.collision_found);
  REQUIRE(out.msg_a != out.msg_b);
  REQUIRE(out.pos_i % 2 == 0);  // collisions only at the planted positions
  REQUIRE(out.pos_j % 2 == 0);
  REQUIRE(out.plan.has_value());
  REQUIRE(out.messages_sealed == oracle.queries());
  REQUIRE(out.plan->predicted.exact == false);
  REQUIRE(out.plan->predicted.value() == 0.5);
  // forged = prefix of the newer message + suffix of the older: length checks
  REQUIRE(out.plan->forged.blocks.size() == (out.pos_j - 1) + (11 - out.pos_i + 1));
}

TEST_CASE("birthday attack with budget 1 finds nothing") {
  SplitMix64 rng(60);
  const BlockWidth w(16);
  auto cipher = ideal_cipher(6000, w);
  auto aux = ideal_cipher(6001, w);
  auto inst = ModeInstance::iobc(cipher, IvPolicy::derived_from_sequence(aux, 0));
  SealOracle oracle(inst);
  BirthdayOutcome out = birthday_chosen_plaintext(oracle, random_block(w, rng), 20, 1, rng);
  REQUIRE_FALSE(out.collision_found);
  REQUIRE(out.messages_sealed == 1);
}

TEST_CASE("success prediction arithmetic") {
  REQUIRE(SuccessPrediction::certain().log2() == 0.0);
  REQUIRE(SuccessPrediction::power_of_two(-22).log2() == Catch::Approx(-22.0));
  REQUIRE(SuccessPrediction::power_of_two(-22).probability == BigRational(1, BigInt(1) << 22));
  REQUIRE_THROWS_AS(SuccessPrediction::power_of_two(1), bounds_error);
}
