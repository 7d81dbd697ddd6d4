/*
 * Copyright 2026 The pqfl Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pqfl/simnet.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "pqfl/rng.hpp"
#include "pqfl/xof.hpp"

namespace pqfl::sim {
namespace {

using Clock = std::chrono::steady_clock;

// Stream identifiers for derive_seed.
enum SeedStream : std::uint64_t {
  kStreamData = 1,
  kStreamTrain = 2,
  kStreamAttack = 3,
  kStreamDp = 4,
  kStreamRsa = 5,
};

constexpr wire::Phase kPhaseOrder[] = {wire::Phase::kLocalTraining, wire::Phase::kSubmission,
                                       wire::Phase::kBroadcast};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class Fn>
void rethrow_as_config(const std::string& field, Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    throw ConfigError(what.starts_with(field + ".") ? what : field + ": " + what);
  }
}

std::size_t held_out(const DataConfig& data) {
  return static_cast<std::size_t>(std::floor(data.test_fraction * static_cast<double>(data.samples_per_client)));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void ScenarioConfig::validate() const {
  if (n_clients < 1) throw ConfigError("n_clients must be >= 1");
  if (n_clients >= wire::kAggregatorId) throw ConfigError("n_clients is too large");
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  if (data.dim < 2) throw ConfigError("data.dim must be >= 2");
  if (!(data.separation >= 0.0) || !std::isfinite(data.separation)) {
    throw ConfigError("data.separation must be finite and >= 0");
  }
  if (!(data.test_fraction >= 0.0 && data.test_fraction < 1.0)) {
    throw ConfigError("data.test_fraction must lie in [0, 1)");
  }
  if (data.samples_per_client < 2 || held_out(data) >= data.samples_per_client) {
    throw ConfigError("data.samples_per_client leaves no training samples");
  }
  if (!(quant_scale > 0.0) || !std::isfinite(quant_scale)) throw ConfigError("quant_scale must be positive");

  rethrow_as_config("training", [&] { training.validate(); });
  rethrow_as_config("agg_rule", [&] { agg_rule.validate(); });
  rethrow_as_config("clip", [&] { clip.validate(); });
  rethrow_as_config("dp", [&] { dp.validate(); });
  rethrow_as_config("attack", [&] { attack.validate(n_clients); });

  if (agg_rule.kind == agg::AggKind::kKrum && n_clients < 2 * agg_rule.krum_f + 3) {
    throw ConfigError("agg_rule: krum requires n_clients >= 2f + 3");
  }
  if (agg_rule.kind == agg::AggKind::kTrimmedMean) {
    const auto trim =
        static_cast<std::size_t>(std::floor(agg_rule.trim_fraction * static_cast<double>(n_clients) + 1e-9));
    if (n_clients <= 2 * trim) throw ConfigError("agg_rule: trimmed mean would discard every client");
  }
  if (suite == wire::CryptoSuite::kPqc) rethrow_as_config("kem", [&] { kem.validate(); });
  if (suite == wire::CryptoSuite::kRsaToy && (rsa_bits < 18 || rsa_bits > 32)) {
    throw ConfigError("rsa_bits must lie in [18, 32]");
  }
}

RoundEngine::RoundEngine(ScenarioConfig config) : config_(std::move(config)), quantizer_(config_.quant_scale) {
  config_.validate();

  const DataConfig& dc = config_.data;
  const auto shards = fl::generate_synthetic_threat_data(derive_seed(config_.seed, {kStreamData}), config_.n_clients,
                                                         dc.samples_per_client, dc.dim, dc.separation);
  const std::size_t n_test = held_out(dc);
  const std::size_t n_train = dc.samples_per_client - n_test;
  std::vector<fl::Dataset> test_parts;
  for (const fl::Dataset& s : shards) {
    fl::Dataset tr{dc.dim, {}, {}};
    fl::Dataset te{dc.dim, {}, {}};
    tr.features.assign(s.features.begin(), s.features.begin() + static_cast<std::ptrdiff_t>(n_train * dc.dim));
    tr.labels.assign(s.labels.begin(), s.labels.begin() + static_cast<std::ptrdiff_t>(n_train));
    te.features.assign(s.features.begin() + static_cast<std::ptrdiff_t>(n_train * dc.dim), s.features.end());
    te.labels.assign(s.labels.begin() + static_cast<std::ptrdiff_t>(n_train), s.labels.end());
    train_.push_back(std::move(tr));
    test_parts.push_back(std::move(te));
  }
  test_ = fl::concat(test_parts);
  if (test_.empty()) test_ = fl::concat(train_);  // no hold-out requested

  params_ = fl::ModelParams::zeros(dc.dim);
  momentum_.assign(dc.dim + 1, 0.0);
  setup();
}

Seed32 RoundEngine::seed32(std::string_view tag, std::uint32_t round, std::uint32_t client) const {
  Xof x;
  x.absorb("pqfl.sim.seed").absorb_u64(config_.seed).absorb_u32(static_cast<std::uint32_t>(tag.size())).absorb(tag);
  x.absorb_u32(round).absorb_u32(client);
  return x.squeeze32();
}

void RoundEngine::setup() {
  wire::RoundTranscript t;
  t.round = 0;
  wire::SessionAnnouncement session{config_.suite, config_.quant_scale,
                                    static_cast<std::uint32_t>(config_.data.dim + 1),
                                    static_cast<std::uint32_t>(config_.n_clients)};
  t.post(wire::kAggregatorId, wire::Phase::kSetup, wire::encode_announcement(session));

  switch (config_.suite) {
    case wire::CryptoSuite::kPlaintext:
      break;
    case wire::CryptoSuite::kRsaToy:
      rsa_key_ = adversary::rsa_toy_keygen(config_.rsa_bits, derive_seed(config_.seed, {kStreamRsa}));
      t.post(wire::kAggregatorId, wire::Phase::kSetup,
             wire::encode_announcement(wire::RsaKeyAnnouncement{rsa_key_->n_modulus, rsa_key_->e_pub}));
      break;
    case wire::CryptoSuite::kPqc: {
      kem_keys_ = kem::kem_keygen(config_.kem, seed32("kem.keygen", 0, wire::kAggregatorId));
      t.post(wire::kAggregatorId, wire::Phase::kSetup,
             wire::encode_announcement(wire::KemKeyAnnouncement{kem_keys_->pub}));
      const sig::SigParams sp;
      for (std::uint32_t i = 0; i < config_.n_clients; ++i) {
        client_keys_.push_back(sig::sig_keygen(sp, seed32("sig.keygen", 0, i)));
        verify_keys_.emplace(i, client_keys_.back().pub);
        t.post(i, wire::Phase::kSetup, wire::encode_announcement(wire::SigKeyAnnouncement{client_keys_.back().pub}));
      }
      break;
    }
  }
  transcripts_.push_back(std::move(t));
}

void RoundEngine::begin_round() {
  if (next_phase_ != -1) throw std::logic_error("round " + std::to_string(round_) + " is still in progress");
  if (round_ >= config_.rounds) throw std::logic_error("all configured rounds have run");
  ++round_;
  wire::RoundTranscript t;
  t.round = round_;
  transcripts_.push_back(std::move(t));
  pending_.clear();
  next_phase_ = 0;
}

void RoundEngine::run_phase(wire::Phase phase) {
  if (next_phase_ < 0) throw std::logic_error("no round is open; call begin_round first");
  if (phase != kPhaseOrder[next_phase_]) {
    throw std::logic_error(std::string("phase ") + static_cast<char>(phase) + " out of order; expected " +
                           static_cast<char>(kPhaseOrder[next_phase_]));
  }
  switch (phase) {
    case wire::Phase::kLocalTraining:
      phase_local_training();
      break;
    case wire::Phase::kSubmission:
      phase_submission();
      break;
    case wire::Phase::kBroadcast:
      phase_aggregation();
      break;
    case wire::Phase::kSetup:
      break;
  }
  next_phase_ = phase == wire::Phase::kBroadcast ? -1 : next_phase_ + 1;
}

void RoundEngine::run_round() {
  begin_round();
  for (wire::Phase p : kPhaseOrder) run_phase(p);
}

void RoundEngine::phase_local_training() {
  const auto start = Clock::now();
  const adversary::AttackSpec& attack = config_.attack;
  pending_.clear();
  for (std::uint32_t i = 0; i < config_.n_clients; ++i) {
    const bool attacker = attack.is_attacker(i);
    const bool flip = attacker && attack.kind == adversary::AttackKind::kLabelFlip;
    const fl::Dataset flipped = flip ? adversary::flip_labels(train_[i]) : fl::Dataset{};
    fl::GradientUpdate u = fl::local_train_step(params_, flip ? flipped : train_[i], config_.training,
                                                derive_seed(config_.seed, {kStreamTrain, round_, i}), i, round_);
    if (attacker && !flip) {
      u = adversary::byzantine_transform(u, attack, derive_seed(config_.seed, {kStreamAttack, round_, i}));
    }
    if (config_.dp.enabled) u = dp::dp_sanitize(u, config_.dp, derive_seed(config_.seed, {kStreamDp, round_, i}));
    pending_.push_back(std::move(u));
  }
  if (config_.dp.enabled) privacy_ = dp::compose_budget(std::move(privacy_), {config_.dp.epsilon, config_.dp.delta});
  current_transcript().timings.local_training_s = seconds_since(start);
}

void RoundEngine::phase_submission() {
  const auto start = Clock::now();
  wire::RoundTranscript& t = current_transcript();
  for (const fl::GradientUpdate& u : pending_) {
    ground_truth_.push_back(GroundTruthEntry{round_, u.client_id, u.delta});
    wire::SignedCipherUpdate sub;
    switch (config_.suite) {
      case wire::CryptoSuite::kPqc:
        sub = agg::seal_update(u, kem_keys_->pub, client_keys_.at(u.client_id), seed32("kem.encaps", round_, u.client_id),
                               seed32("sig.sign", round_, u.client_id), quantizer_);
        break;
      case wire::CryptoSuite::kRsaToy: {
        std::vector<std::uint64_t> blocks;
        for (std::int16_t v : quantizer_.quantize(u.delta)) {
          blocks.push_back(adversary::rsa_toy_cipher(*rsa_key_, static_cast<std::uint16_t>(v),
                                                     adversary::RsaDirection::kEncrypt));
        }
        sub.round = round_;
        sub.client_id = u.client_id;
        sub.payload = wire::encode_rsa_blocks(blocks);
        break;
      }
      case wire::CryptoSuite::kPlaintext:
        sub.round = round_;
        sub.client_id = u.client_id;
        sub.payload = quantizer_.encode(u.delta);
        break;
    }
    t.post(u.client_id, wire::Phase::kSubmission, sub.to_bytes());
  }
  t.timings.submission_s = seconds_since(start);
}

agg::GlobalUpdate RoundEngine::aggregate_bus() {
  std::vector<wire::SignedCipherUpdate> subs;
  std::vector<std::uint32_t> unreadable;
  for (const wire::WireMessage& m : current_transcript().messages) {
    if (m.phase != wire::Phase::kSubmission) continue;
    try {
      subs.push_back(wire::SignedCipherUpdate::from_bytes(m.bytes));
    } catch (const DecodeError&) {
      unreadable.push_back(m.sender);
    }
  }
  const std::size_t dim = config_.data.dim + 1;

  agg::GlobalUpdate g;
  if (config_.suite == wire::CryptoSuite::kPqc) {
    if (subs.empty()) throw agg::AggError("no verified contributors");
    g = agg::verified_secure_aggregate(subs, verify_keys_, *kem_keys_, config_.agg_rule, config_.clip, quantizer_,
                                       dim);
  } else {
    std::vector<fl::GradientUpdate> updates;
    std::vector<std::uint32_t> rejected;
    for (const wire::SignedCipherUpdate& s : subs) {
      try {
        std::vector<double> delta;
        if (config_.suite == wire::CryptoSuite::kRsaToy) {
          for (std::uint64_t c : wire::decode_rsa_blocks(s.payload)) {
            if (c >= rsa_key_->n_modulus) throw DecodeError("RSA block out of range");
            const std::uint64_t m = adversary::rsa_toy_cipher(*rsa_key_, c, adversary::RsaDirection::kDecrypt);
            if (m > 0xFFFF) throw DecodeError("RSA block does not decrypt to 16 bits");
            delta.push_back(quantizer_.dequantize(static_cast<std::int16_t>(static_cast<std::uint16_t>(m))));
          }
        } else {
          delta = quantizer_.decode(s.payload);
        }
        if (delta.size() != dim) throw DecodeError("payload dimension mismatch");
        updates.push_back(fl::GradientUpdate::make(s.client_id, s.round, std::move(delta)));
      } catch (const DecodeError&) {
        rejected.push_back(s.client_id);
      }
    }
    g = agg::aggregate_plain(updates, config_.agg_rule, config_.clip);
    g.excluded = std::move(rejected);
  }
  g.excluded.insert(g.excluded.end(), unreadable.begin(), unreadable.end());
  std::sort(g.excluded.begin(), g.excluded.end());
  return g;
}

void RoundEngine::phase_aggregation() {
  const auto start = Clock::now();
  const agg::GlobalUpdate g = aggregate_bus();
  agg::MomentumStep step = agg::momentum_normalize(momentum_, g.vector, config_.clip.momentum_beta);
  momentum_ = std::move(step.momentum);
  params_ = fl::apply_global_update(params_, step.emitted);
  wire::RoundTranscript& t = current_transcript();
  t.post(wire::kAggregatorId, wire::Phase::kBroadcast, wire::ModelBroadcast{round_, params_.flatten()}.to_bytes());
  t.timings.aggregation_s = seconds_since(start);

  const fl::Evaluation ev = fl::evaluate(params_, test_);
  RoundMetrics rm;
  rm.round = round_;
  rm.loss = ev.loss;
  rm.accuracy = ev.accuracy;
  rm.contributors = g.contributors.size();
  rm.excluded = g.excluded.size();
  rm.bytes = t.bytes_on_wire;
  rm.timings = t.timings;
  metrics_.rounds.push_back(rm);
  metrics_.final_accuracy = ev.accuracy;
  metrics_.total_epsilon = privacy_.total_epsilon;
  metrics_.total_delta = privacy_.total_delta;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  RoundEngine engine(config);
  for (std::size_t r = 0; r < config.rounds; ++r) engine.run_round();
  return ScenarioResult{engine.metrics(), engine.transcripts(), engine.ground_truth(), engine.params()};
}

double submission_aggregation_seconds(const Metrics& metrics) {
  double total = 0.0;
  for (const RoundMetrics& r : metrics.rounds) total += r.timings.submission_s + r.timings.aggregation_s;
  return total;
}

OverheadReport measure_overhead(const ScenarioConfig& base, const ScenarioConfig& variant, std::size_t repetitions) {
  auto crypto_free = [](ScenarioConfig c) {
    c.suite = wire::CryptoSuite::kPlaintext;
    c.kem = kem::KemParams{};
    c.rsa_bits = 32;
    return c;
  };
  if (!(crypto_free(base) == crypto_free(variant))) {
    throw ConfigError("overhead configs may differ only in crypto_suite, kem, and rsa_bits");
  }
  if (repetitions < 1) throw ConfigError("overhead needs at least one repetition");

  run_scenario(base);
  run_scenario(variant);
  OverheadReport rep;
  for (std::size_t i = 0; i < repetitions; ++i) {
    rep.base_s.push_back(submission_aggregation_seconds(run_scenario(base).metrics));
    rep.variant_s.push_back(submission_aggregation_seconds(run_scenario(variant).metrics));
  }
  rep.base_median_s = median(rep.base_s);
  rep.variant_median_s = median(rep.variant_s);
  if (!(rep.base_median_s > 0.0)) throw std::runtime_error("baseline phase B+C time is zero; cannot form a ratio");
  rep.ratio = (rep.variant_median_s - rep.base_median_s) / rep.base_median_s;
  return rep;
}

std::vector<BenchComparison> bench_comparisons(const ScenarioConfig& config, std::size_t repetitions) {
  ScenarioConfig plain = config;
  plain.suite = wire::CryptoSuite::kPlaintext;
  ScenarioConfig pqc = config;
  pqc.suite = wire::CryptoSuite::kPqc;
  pqc.kem = kem::default_kem_params();
  ScenarioConfig pqc3 = pqc;
  pqc3.kem = kem::rank3_kem_params();

  std::vector<BenchComparison> out;
  out.push_back({"pqc_vs_plaintext", measure_overhead(plain, pqc, repetitions)});
  out.push_back({"kem_k3_vs_k2", measure_overhead(pqc, pqc3, repetitions)});
  return out;
}

}  // namespace pqfl::sim
