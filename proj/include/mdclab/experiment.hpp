#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mdclab/aes_adapter.hpp"
#include "mdclab/attacks.hpp"
#include "mdclab/cipher.hpp"
#include "mdclab/modes.hpp"

namespace mdclab {

enum class AttackId {
  PesInsert,
  GeneralInsert,
  EpbcGuess,
  Splice,
  IobcShorten,
  IvReuse,
  Birthday,
};

inline const char* to_string(AttackId a) {
  switch (a) {
    case AttackId::PesInsert: return "pes-insert";
    case AttackId::GeneralInsert: return "general-insert";
    case AttackId::EpbcGuess: return "epbc-guess";
    case AttackId::Splice: return "splice";
    case AttackId::IobcShorten: return "iobc-shorten";
    case AttackId::IvReuse: return "iv-reuse";
    case AttackId::Birthday: return "birthday";
  }
  return "?";
}

inline AttackId attack_from_string(std::string_view s) {
  if (s == "pes-insert") return AttackId::PesInsert;
  if (s == "general-insert") return AttackId::GeneralInsert;
  if (s == "epbc-guess") return AttackId::EpbcGuess;
  if (s == "splice") return AttackId::Splice;
  if (s == "iobc-shorten") return AttackId::IobcShorten;
  if (s == "iv-reuse") return AttackId::IvReuse;
  if (s == "birthday") return AttackId::Birthday;
  throw config_error("unknown attack '" + std::string(s) + "'");
}

/// Mode names as used by the CLI and result files.
inline const char* mode_name(FeedbackFunctionId g) {
  switch (g) {
    case FeedbackFunctionId::Identity: return "pes-pcbc";
    case FeedbackFunctionId::IobcRotation: return "iobc";
    case FeedbackFunctionId::EpbcBoolean: return "epbc";
  }
  return "?";
}

inline FeedbackFunctionId mode_from_string(std::string_view s) {
  if (s == "pes-pcbc") return FeedbackFunctionId::Identity;
  if (s == "iobc") return FeedbackFunctionId::IobcRotation;
  if (s == "epbc") return FeedbackFunctionId::EpbcBoolean;
  throw config_error("unknown mode '" + std::string(s) + "'");
}

/// One Monte-Carlo experiment: `trials` independent runs of a named attack,
/// each under its own derived seed. Every parameter is validated before any
/// work starts; missing parameters take documented defaults.
struct ExperimentConfig {
  AttackId attack = AttackId::PesInsert;
  FeedbackFunctionId mode = FeedbackFunctionId::Identity;
  unsigned width = 8;
  std::string cipher = "ideal";  // ideal | feistel | aes128
  std::uint64_t seed = 1;
  std::uint64_t trials = 1;
  std::optional<unsigned> j;               // insertion/splice index (splice: u)
  std::optional<unsigned> k;               // shorten parameter / splice index v
  std::optional<std::uint64_t> budget;     // guess cap or birthday message budget
  std::optional<unsigned> weight_limit;    // epbc-guess candidate cutoff
  unsigned message_blocks = 11;            // message length before the MDC block
  unsigned blocks_per_message = 64;        // birthday chosen-plaintext message length
  bool control = false;                    // corrupt the correction: measures the baseline rate
  unsigned threads = 0;                    // 0 = hardware concurrency (does not affect results)
};

struct QueryStats {
  std::uint64_t total = 0;
  std::uint64_t max = 0;
  double mean = 0;
};

struct ExperimentResult {
  ExperimentConfig config;  // with defaults resolved
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double empirical = 0;
  SuccessPrediction predicted;
  double band_low = 0, band_high = 1;
  std::string band_kind;  // "exact", "3sigma", or "absolute"
  bool within_band = false;
  QueryStats queries;
  std::uint64_t conditioned_runs = 0;       // guess: weight within limit; birthday: collision found
  std::uint64_t conditioned_successes = 0;
  double conditional_rate = 0;
  double duration_seconds = 0;  // table output only, never serialized
};

namespace detail {

struct TrialOutcome {
  bool success = false;
  bool conditioned = false;
  bool conditioned_success = false;
  std::uint64_t queries = 0;
};

inline constexpr std::uint64_t kCipherStream = 0x8000000000000001ull;
inline constexpr std::uint64_t kAuxStream = 0x8000000000000002ull;

inline CipherPtr make_backend(const std::string& kind, std::uint64_t seed, BlockWidth w) {
  SplitMix64 s(seed);
  if (kind == "ideal") return ideal_cipher(s.next(), w);
  if (kind == "feistel") {
    std::array<std::uint8_t, 16> key{};
    for (unsigned i = 0; i < 2; ++i) {
      std::uint64_t v = s.next();
      for (unsigned b = 0; b < 8; ++b) key[i * 8 + b] = static_cast<std::uint8_t>(v >> (56 - 8 * b));
    }
    return feistel_cipher(key, w);
  }
  if (kind == "aes128") {
    std::array<std::uint8_t, 16> key{};
    for (unsigned i = 0; i < 2; ++i) {
      std::uint64_t v = s.next();
      for (unsigned b = 0; b < 8; ++b) key[i * 8 + b] = static_cast<std::uint8_t>(v >> (56 - 8 * b));
    }
    return external_cipher("aes128", key, w);
  }
  throw config_error("unknown cipher backend '" + kind + "'");
}

inline IvPair random_distinct_pair(BlockWidth w, SplitMix64& rng) {
  Block f0 = random_block(w, rng);
  Block g0 = random_block(w, rng);
  while (g0 == f0) g0 = random_block(w, rng);
  return {std::move(f0), std::move(g0)};
}

inline std::vector<Block> random_message(BlockWidth w, unsigned count, SplitMix64& rng) {
  std::vector<Block> out;
  out.reserve(count);
  for (unsigned i = 0; i < count; ++i) out.push_back(random_block(w, rng));
  return out;
}

}  // namespace detail

/// Validate a configuration against the chosen attack's preconditions and
/// resolve defaulted parameters. Throws config/bounds errors; returns the
/// resolved copy used by run_experiment.
inline ExperimentConfig validate_config(const ExperimentConfig& in) {
  ExperimentConfig cfg = in;
  const BlockWidth w(cfg.width);
  if (cfg.trials < 1) throw config_error("trials must be >= 1");

  if (cfg.cipher == "ideal") {
    if (cfg.width > 20) throw config_error("ideal cipher supports widths up to 20");
  } else if (cfg.cipher == "feistel") {
    // any even width
  } else if (cfg.cipher == "aes128") {
    if (cfg.width != 128) throw config_error("aes128 backend requires width 128");
  } else {
    throw config_error("unknown cipher backend '" + cfg.cipher + "'");
  }

  switch (cfg.attack) {
    case AttackId::PesInsert:
      cfg.mode = FeedbackFunctionId::Identity;
      break;
    case AttackId::EpbcGuess:
      cfg.mode = FeedbackFunctionId::EpbcBoolean;
      break;
    case AttackId::IobcShorten:
      if (cfg.mode == FeedbackFunctionId::EpbcBoolean)
        throw config_error("iobc-shorten needs a linear feedback function");
      break;
    case AttackId::IvReuse:
      if (cfg.mode == FeedbackFunctionId::EpbcBoolean)
        throw config_error("iv-reuse needs a linear feedback function");
      break;
    default:
      break;
  }

  if (cfg.mode == FeedbackFunctionId::IobcRotation) {
    if (cfg.width % 4 != 0) throw config_error("iobc requires width divisible by 4");
    const std::uint64_t limit = static_cast<std::uint64_t>(cfg.width) * cfg.width / 2 - 1;
    const unsigned msg = cfg.attack == AttackId::Birthday ? cfg.blocks_per_message
                                                          : cfg.message_blocks;
    if (msg + 1 > limit)
      throw config_error("message length exceeds the IOBC limit of " + std::to_string(limit) +
                         " blocks");
  }

  const unsigned t = cfg.message_blocks + 1;  // sealed length
  switch (cfg.attack) {
    case AttackId::PesInsert:
    case AttackId::GeneralInsert:
    case AttackId::EpbcGuess: {
      // Guess default: insert just before the MDC block. Wrong candidates can
      // still be accepted through resynchronization of the non-injective
      // feedback, at about (3/8)^{n/2} per step after the insertion; the late
      // position leaves only one such step, keeping the measured rate close
      // to the covering-probability model.
      if (!cfg.j) cfg.j = cfg.attack == AttackId::EpbcGuess ? t - 1 : (t + 1) / 2;
      if (*cfg.j <= 1 || *cfg.j >= t) throw config_error("need 1 < j < t");
      if (cfg.attack == AttackId::EpbcGuess) {
        if (!cfg.weight_limit) cfg.weight_limit = EpbcDeltaCandidates::default_weight_limit(w);
        if (!cfg.budget) {
          BigInt count = EpbcDeltaCandidates::count(w, *cfg.weight_limit);
          cfg.budget = count > BigInt(~0ull) ? ~0ull : count.convert_to<std::uint64_t>();
        }
      }
      if (cfg.control && cfg.attack != AttackId::GeneralInsert)
        throw config_error("control runs are defined for general-insert, iobc-shorten, iv-reuse");
      if (cfg.control && cfg.mode == FeedbackFunctionId::EpbcBoolean)
        throw config_error(
            "no wrong-delta control for epbc: its non-injective feedback resynchronizes the "
            "chains far above the 2^-n baseline");
      break;
    }
    case AttackId::Splice: {
      if (!cfg.j) cfg.j = (t + 1) / 2;  // u
      if (!cfg.k) cfg.k = (t + 1) / 2;  // v
      if (*cfg.j <= 1 || *cfg.j >= t) throw config_error("need 1 < u < t'");
      if (*cfg.k <= 1 || *cfg.k >= t) throw config_error("need 1 < v < t");
      if (cfg.control) throw config_error("control runs are not defined for splice");
      break;
    }
    case AttackId::IobcShorten: {
      if (!cfg.j) cfg.j = 1;
      if (!cfg.k) cfg.k = 5;
      if (*cfg.j < 1 || *cfg.k < 1) throw config_error("need j >= 1 and k >= 1");
      if (*cfg.j + 2ull * *cfg.k + 1 > t)
        throw config_error("need j + 2k + 1 <= t; increase --message-blocks");
      break;
    }
    case AttackId::IvReuse: {
      if (t < 4) throw config_error("iv-reuse needs a sealed length of at least 4 blocks");
      break;
    }
    case AttackId::Birthday: {
      if (cfg.blocks_per_message < 2) throw config_error("need at least 2 blocks per message");
      if (!cfg.budget) cfg.budget = 1024;
      if (*cfg.budget < 1) throw config_error("budget must be >= 1");
      if (cfg.width < 64 && *cfg.budget >= (1ull << cfg.width))
        throw config_error("budget exceeds the sequence-number space");
      if (cfg.control) throw config_error("control runs are not defined for birthday");
      break;
    }
  }
  return cfg;
}

/// Exact (or flagged-approximate) acceptance probability the theory assigns
/// to this configuration.
namespace detail {
/// A uniformly random correction hits the one exact Lemma-1 correction with
/// probability 2^-n (accept for sure), otherwise the garbled chain still
/// ends on the MDC with probability about 2^-n, so the control baseline is
/// 2^{-n+1} - 2^{-2n}. Model-based, flagged inexact.
inline SuccessPrediction control_baseline(unsigned n) {
  BigInt den = BigInt(1) << (2 * n);
  BigInt num = (BigInt(1) << (n + 1)) - 1;
  return SuccessPrediction::ratio(std::move(num), std::move(den), /*exact_value=*/false);
}
}  // namespace detail

inline SuccessPrediction predicted_rate(const ExperimentConfig& cfg) {
  switch (cfg.attack) {
    case AttackId::PesInsert:
      return SuccessPrediction::certain();
    case AttackId::GeneralInsert:
    case AttackId::Splice:
    case AttackId::IvReuse:
      if (cfg.control) return detail::control_baseline(cfg.width);
      return SuccessPrediction::certain();
    case AttackId::IobcShorten:
      if (cfg.control) return detail::control_baseline(cfg.width);
      if (cfg.mode == FeedbackFunctionId::Identity) return SuccessPrediction::certain();
      return SuccessPrediction::power_of_two(
          fixed_point_log2_fraction(iobc_position_permutation(BlockWidth(cfg.width)), *cfg.k));
    case AttackId::EpbcGuess:
      return epbc_guess_success_probability(BlockWidth(cfg.width), *cfg.weight_limit);
    case AttackId::Birthday:
      return {BigRational(1, 2), false};
  }
  throw config_error("unknown attack");
}

namespace detail {

inline ModeInstance make_instance(const ExperimentConfig& cfg, const CipherPtr& cipher,
                                  const CipherPtr& aux, SplitMix64& iv_stream,
                                  SplitMix64& mdc_stream, bool force_explicit_reuse,
                                  bool force_fresh) {
  const BlockWidth w(cfg.width);
  Block mdc = random_block(w, mdc_stream);
  IvPolicy policy = [&] {
    if (force_fresh) return IvPolicy::fresh_explicit(iv_stream.next());
    if (cfg.attack == AttackId::Birthday || (!force_explicit_reuse &&
        cfg.mode == FeedbackFunctionId::IobcRotation))
      return IvPolicy::derived_from_sequence(aux, 0);
    return IvPolicy::explicit_secret(random_distinct_pair(w, iv_stream));
  }();
  switch (cfg.mode) {
    case FeedbackFunctionId::Identity: return ModeInstance::pes_pcbc(cipher, policy, mdc);
    case FeedbackFunctionId::IobcRotation: return ModeInstance::iobc(cipher, policy, mdc);
    case FeedbackFunctionId::EpbcBoolean: return ModeInstance::epbc(cipher, policy, mdc);
  }
  throw config_error("unknown mode");
}

inline TrialOutcome run_trial(const ExperimentConfig& cfg, const CipherPtr& cipher,
                              const CipherPtr& aux, std::uint64_t trial_seed) {
  const BlockWidth w(cfg.width);
  SplitMix64 iv_stream(derive_seed(trial_seed, 2));
  SplitMix64 msg_stream(derive_seed(trial_seed, 3));
  SplitMix64 mdc_stream(derive_seed(trial_seed, 4));
  SplitMix64 ctrl_stream(derive_seed(trial_seed, 5));

  TrialOutcome out;
  switch (cfg.attack) {
    case AttackId::PesInsert: {
      ModeInstance inst = make_instance(cfg, cipher, aux, iv_stream, mdc_stream, false, false);
      auto rec = inst.seal_traced(random_message(w, cfg.message_blocks, msg_stream));
      const unsigned j = *cfg.j;
      ForgeryPlan plan = forge_pes_insert(rec.ciphertext, j, rec.plaintext[j - 1]);
      VerifierOracle oracle(inst);
      out.success = oracle.verify(plan.forged);
      out.queries = oracle.queries();
      return out;
    }
    case AttackId::GeneralInsert: {
      ModeInstance inst = make_instance(cfg, cipher, aux, iv_stream, mdc_stream, false, false);
      auto rec = inst.seal_traced(random_message(w, cfg.message_blocks, msg_stream));
      const unsigned j = *cfg.j;
      Block delta = cfg.control
                        ? random_block(w, ctrl_stream)
                        : rec.trace.g[j] ^ g_apply(cfg.mode, rec.trace.g[j]);
      ForgeryPlan plan = forge_general_insert(rec.ciphertext, j, rec.plaintext[j - 1], delta);
      VerifierOracle oracle(inst);
      out.success = oracle.verify(plan.forged);
      out.queries = oracle.queries();
      return out;
    }
    case AttackId::EpbcGuess: {
      ModeInstance inst = make_instance(cfg, cipher, aux, iv_stream, mdc_stream, false, false);
      auto rec = inst.seal_traced(random_message(w, cfg.message_blocks, msg_stream));
      const unsigned j = *cfg.j;
      // weight of the guessed half of the true delta, for the conditional stat
      const Block true_delta = rec.trace.g[j] ^ g_epbc(rec.trace.g[j]);
      unsigned half_weight = 0;
      for (unsigned i = 1; i <= w.bits() / 2; ++i) half_weight += true_delta.bit(i) ? 1 : 0;
      out.conditioned = half_weight <= *cfg.weight_limit;
      VerifierOracle oracle(inst);
      GuessOutcome guess = epbc_guess_forgery(rec.ciphertext, j, rec.plaintext[j - 1], oracle,
                                              *cfg.weight_limit, *cfg.budget);
      out.success = guess.success;
      out.conditioned_success = out.conditioned && out.success;
      out.queries = guess.trials_used;
      return out;
    }
    case AttackId::Splice: {
      ModeInstance inst = make_instance(cfg, cipher, aux, iv_stream, mdc_stream, false, false);
      auto rec_c = inst.seal_traced(random_message(w, cfg.message_blocks, msg_stream));
      auto rec_cp = inst.seal_traced(random_message(w, cfg.message_blocks, msg_stream));
      const unsigned u = *cfg.j, v = *cfg.k;
      Block correction = g_apply(cfg.mode, rec_cp.trace.g[u - 1]) ^
                         g_apply(cfg.mode, rec_c.trace.g[v - 1]);
      ForgeryPlan plan = forge_splice(rec_c.ciphertext, rec_cp.ciphertext, u, v, correction);
      VerifierOracle oracle(inst);
      out.success = oracle.verify(plan.forged);
      out.queries = oracle.queries();
      return out;
    }
    case AttackId::IobcShorten: {
      ModeInstance inst = make_instance(cfg, cipher, aux, iv_stream, mdc_stream, false, false);
      auto rec = inst.seal_traced(random_message(w, cfg.message_blocks, msg_stream));
      const unsigned j = *cfg.j, k = *cfg.k;
      std::vector<Block> known;
      known.reserve(k);
      for (unsigned i = 1; i <= k; ++i) known.push_back(rec.plaintext[j + 2 * i - 1]);
      ForgeryPlan plan = forge_iobc_shorten(rec.ciphertext, j, k, known, cfg.mode);
      if (cfg.control) {
        // random correction instead of g(Delta_k): baseline acceptance
        plan.forged.blocks[j] = rec.ciphertext.blocks[j + 2 * k] ^ random_block(w, ctrl_stream);
      }
      VerifierOracle oracle(inst);
      out.success = oracle.verify(plan.forged);
      out.queries = oracle.queries();
      return out;
    }
    case AttackId::IvReuse: {
      ModeInstance inst =
          make_instance(cfg, cipher, aux, iv_stream, mdc_stream, !cfg.control, cfg.control);
      auto rec_c = inst.seal_traced(random_message(w, cfg.message_blocks, msg_stream));
      auto rec_cp = inst.seal_traced(random_message(w, cfg.message_blocks, msg_stream));
      ForgeryPlan plan = forge_iv_reuse(rec_c.ciphertext, rec_cp.ciphertext, rec_c.plaintext[1],
                                        rec_cp.plaintext[1], cfg.mode);
      VerifierOracle oracle(inst);
      out.success = oracle.verify(plan.forged);
      out.queries = oracle.queries();
      return out;
    }
    case AttackId::Birthday: {
      ModeInstance inst = make_instance(cfg, cipher, aux, iv_stream, mdc_stream, false, false);
      SealOracle seal_oracle(inst);
      Block p_star = random_block(w, msg_stream);
      BirthdayOutcome bd = birthday_chosen_plaintext(seal_oracle, p_star, cfg.blocks_per_message,
                                                     *cfg.budget, msg_stream);
      out.conditioned = bd.collision_found;
      out.queries = bd.messages_sealed;
      if (bd.collision_found) {
        VerifierOracle oracle(inst);
        out.success = oracle.verify(bd.plan->forged);
        out.conditioned_success = out.success;
      }
      return out;
    }
  }
  throw config_error("unknown attack");
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& in) {
  const ExperimentConfig cfg = validate_config(in);
  const BlockWidth w(cfg.width);
  const auto started = std::chrono::steady_clock::now();

  const CipherPtr cipher =
      detail::make_backend(cfg.cipher, derive_seed(cfg.seed, detail::kCipherStream), w);
  const bool needs_aux =
      cfg.attack == AttackId::Birthday || cfg.mode == FeedbackFunctionId::IobcRotation;
  const CipherPtr aux =
      needs_aux ? detail::make_backend(cfg.cipher, derive_seed(cfg.seed, detail::kAuxStream), w)
                : nullptr;

  std::vector<detail::TrialOutcome> outcomes(cfg.trials);
  unsigned workers = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (workers > cfg.trials) workers = static_cast<unsigned>(cfg.trials);

  auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i)
      outcomes[i] = detail::run_trial(cfg, cipher, aux, derive_seed(cfg.seed, i));
  };
  if (workers <= 1) {
    run_range(0, cfg.trials);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (cfg.trials + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t) {
      const std::uint64_t begin = t * chunk;
      const std::uint64_t end = std::min<std::uint64_t>(begin + chunk, cfg.trials);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  ExperimentResult res;
  res.config = cfg;
  res.trials = cfg.trials;
  for (const auto& o : outcomes) {
    res.successes += o.success ? 1 : 0;
    res.conditioned_runs += o.conditioned ? 1 : 0;
    res.conditioned_successes += o.conditioned_success ? 1 : 0;
    res.queries.total += o.queries;
    res.queries.max = std::max(res.queries.max, o.queries);
  }
  res.empirical = static_cast<double>(res.successes) / static_cast<double>(res.trials);
  res.queries.mean = static_cast<double>(res.queries.total) / static_cast<double>(res.trials);
  res.conditional_rate = res.conditioned_runs
                             ? static_cast<double>(res.conditioned_successes) /
                                   static_cast<double>(res.conditioned_runs)
                             : 0.0;
  res.predicted = predicted_rate(cfg);

  const double p = res.predicted.value();
  const bool on_conditional = cfg.attack == AttackId::Birthday;
  const double observed = on_conditional ? res.conditional_rate : res.empirical;
  const std::uint64_t denom = on_conditional ? res.conditioned_runs : res.trials;
  if (cfg.attack == AttackId::Birthday) {
    // the half-probability claim is an approximation; fixed +-0.1 tolerance
    res.band_kind = "absolute";
    res.band_low = p - 0.1;
    res.band_high = p + 0.1;
  } else if (p == 1.0) {
    res.band_kind = "exact";
    res.band_low = res.band_high = 1.0;
  } else {
    res.band_kind = "3sigma";
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(res.trials));
    res.band_low = p - 3 * sigma;
    res.band_high = p + 3 * sigma;
  }
  res.within_band = denom > 0 && observed >= res.band_low && observed <= res.band_high;

  res.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return res;
}

/// Canonical JSON for an experiment result. Deterministic for a fixed
/// config: wall-clock time and thread count are deliberately excluded.
inline nlohmann::ordered_json result_to_json(const ExperimentResult& r) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  nlohmann::ordered_json cfg;
  cfg["attack"] = to_string(r.config.attack);
  cfg["mode"] = mode_name(r.config.mode);
  cfg["width"] = r.config.width;
  cfg["cipher"] = r.config.cipher;
  cfg["seed"] = r.config.seed;
  cfg["trials"] = r.config.trials;
  if (r.config.j) cfg["j"] = *r.config.j;
  if (r.config.k) cfg["k"] = *r.config.k;
  if (r.config.budget) cfg["budget"] = *r.config.budget;
  if (r.config.weight_limit) cfg["weight_limit"] = *r.config.weight_limit;
  cfg["message_blocks"] = r.config.message_blocks;
  if (r.config.attack == AttackId::Birthday)
    cfg["blocks_per_message"] = r.config.blocks_per_message;
  cfg["control"] = r.config.control;
  j["config"] = std::move(cfg);

  j["trials"] = r.trials;
  j["successes"] = r.successes;
  j["empirical"] = r.empirical;
  nlohmann::ordered_json pred;
  pred["probability"] = boost::multiprecision::numerator(r.predicted.probability).str() + "/" +
                        boost::multiprecision::denominator(r.predicted.probability).str();
  pred["value"] = r.predicted.value();
  pred["log2"] = r.predicted.log2();
  pred["exact"] = r.predicted.exact;
  j["predicted"] = std::move(pred);
  nlohmann::ordered_json band;
  band["kind"] = r.band_kind;
  band["low"] = r.band_low;
  band["high"] = r.band_high;
  j["band"] = std::move(band);
  j["within_band"] = r.within_band;
  nlohmann::ordered_json q;
  q["total"] = r.queries.total;
  q["mean"] = r.queries.mean;
  q["max"] = r.queries.max;
  j["queries"] = std::move(q);
  if (r.config.attack == AttackId::EpbcGuess || r.config.attack == AttackId::Birthday) {
    nlohmann::ordered_json cond;
    cond["runs"] = r.conditioned_runs;
    cond["successes"] = r.conditioned_successes;
    cond["rate"] = r.conditional_rate;
    j["conditional"] = std::move(cond);
  }
  return j;
}

/// Human-readable summary, one field per line.
inline std::string result_table(const ExperimentResult& r) {
  auto line = [](const std::string& k, const std::string& v) {
    std::string out = k;
    out.resize(22, ' ');
    return out + v + "\n";
  };
  std::string out;
  out += line("attack", to_string(r.config.attack));
  out += line("mode", mode_name(r.config.mode));
  out += line("width", std::to_string(r.config.width));
  out += line("cipher", r.config.cipher);
  out += line("seed", std::to_string(r.config.seed));
  if (r.config.j) out += line("j", std::to_string(*r.config.j));
  if (r.config.k) out += line("k", std::to_string(*r.config.k));
  if (r.config.weight_limit) out += line("weight_limit", std::to_string(*r.config.weight_limit));
  if (r.config.budget) out += line("budget", std::to_string(*r.config.budget));
  if (r.config.control) out += line("control", "yes");
  out += line("trials", std::to_string(r.trials));
  out += line("successes", std::to_string(r.successes));
  out += line("empirical", std::to_string(r.empirical));
  out += line("predicted", std::to_string(r.predicted.value()) +
                               (r.predicted.exact ? " (exact)" : " (approx)"));
  out += line("band", "[" + std::to_string(r.band_low) + ", " + std::to_string(r.band_high) +
                          "] (" + r.band_kind + ")");
  out += line("within_band", r.within_band ? "yes" : "no");
  out += line("queries_mean", std::to_string(r.queries.mean));
  if (r.config.attack == AttackId::EpbcGuess || r.config.attack == AttackId::Birthday) {
    out += line("conditional", std::to_string(r.conditional_rate) + " over " +
                                   std::to_string(r.conditioned_runs) + " runs");
  }
  out += line("duration_s", std::to_string(r.duration_seconds));
  return out;
}

}  // namespace mdclab
