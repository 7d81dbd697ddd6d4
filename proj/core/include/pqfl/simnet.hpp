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

// Deterministic round engine. Every round runs three phases over an
// in-memory bus:
//   A  local training (attacks and client-side DP applied here)
//   B  quantize, encrypt per suite, sign (pqc), post to the bus
//   C  aggregator reads the bus, aggregates, applies momentum, broadcasts
// Round 0 is a setup round in which every public key is announced, so an
// eavesdropper recording the bus sees everything it needs.

#ifndef PQFL_SIMNET_HPP_
#define PQFL_SIMNET_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqfl/adversary.hpp"
#include "pqfl/dp.hpp"
#include "pqfl/fl.hpp"
#include "pqfl/kem.hpp"
#include "pqfl/quantize.hpp"
#include "pqfl/robust_agg.hpp"
#include "pqfl/sig.hpp"
#include "pqfl/wire.hpp"

namespace pqfl::sim {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DataConfig {
  std::size_t samples_per_client = 200;
  std::size_t dim = 8;
  double separation = 4.0;
  double test_fraction = 0.2;  // held out from every shard for evaluation

  friend bool operator==(const DataConfig&, const DataConfig&) = default;
};

struct ScenarioConfig {
  std::size_t n_clients = 0;
  std::size_t rounds = 0;
  wire::CryptoSuite suite = wire::CryptoSuite::kPlaintext;
  agg::AggRule agg_rule;
  agg::ClipPolicy clip;
  dp::NoiseMechanism dp;
  adversary::AttackSpec attack;
  DataConfig data;
  fl::TrainingConfig training;
  std::uint64_t seed = 0;
  double quant_scale = quant::kDefaultScale;
  kem::KemParams kem;
  unsigned rsa_bits = 32;  // rsa_toy only; 16-bit blocks need a modulus above 2^16

  // Throws ConfigError naming the offending field.
  void validate() const;
  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct RoundMetrics {
  std::uint32_t round = 0;
  double loss = 0.0;
  double accuracy = 0.0;
  std::size_t contributors = 0;
  std::size_t excluded = 0;
  std::uint64_t bytes = 0;
  wire::PhaseTimings timings;
};

struct Metrics {
  std::vector<RoundMetrics> rounds;
  double final_accuracy = 0.0;
  std::optional<double> overhead_ratio;  // only set by overhead runs
  double total_epsilon = 0.0;
  double total_delta = 0.0;
};

// What each client actually put on the wire, before encryption. Kept for
// test assertions; aggregation never reads it.
struct GroundTruthEntry {
  std::uint32_t round = 0;
  std::uint32_t client_id = 0;
  std::vector<double> delta;
};

struct ScenarioResult {
  Metrics metrics;
  std::vector<wire::RoundTranscript> transcripts;  // [0] is setup
  std::vector<GroundTruthEntry> ground_truth;
  fl::ModelParams final_params;
};

class RoundEngine {
 public:
  // Validates the config, builds the data shards, and runs setup.
  explicit RoundEngine(ScenarioConfig config);

  const ScenarioConfig& config() const { return config_; }
  std::uint32_t round() const { return round_; }
  const fl::ModelParams& params() const { return params_; }
  const Metrics& metrics() const { return metrics_; }
  const std::vector<wire::RoundTranscript>& transcripts() const { return transcripts_; }
  const std::vector<GroundTruthEntry>& ground_truth() const { return ground_truth_; }
  const std::vector<fl::Dataset>& train_shards() const { return train_; }
  const fl::Dataset& test_set() const { return test_; }

  // Opens the next round. Throws std::logic_error if the current one is
  // still in progress.
  void begin_round();
  // Phases must run A, B, C in order inside an open round.
  void run_phase(wire::Phase phase);
  void run_round();

  // Test hooks. Updates produced by phase A, consumed by phase B.
  std::vector<fl::GradientUpdate>& pending_updates() { return pending_; }
  // The transcript of the open round; phase C reads submissions from here.
  wire::RoundTranscript& current_transcript() { return transcripts_.back(); }

 private:
  void setup();
  void phase_local_training();
  void phase_submission();
  void phase_aggregation();
  agg::GlobalUpdate aggregate_bus();
  Seed32 seed32(std::string_view tag, std::uint32_t round, std::uint32_t client) const;

  ScenarioConfig config_;
  quant::Quantizer quantizer_;
  std::vector<fl::Dataset> train_;
  fl::Dataset test_;
  fl::ModelParams params_;
  std::vector<double> momentum_;

  std::optional<kem::KemKeyPair> kem_keys_;
  std::optional<adversary::RsaToyKey> rsa_key_;
  std::vector<sig::SigKeyPair> client_keys_;
  agg::VerifyKeyMap verify_keys_;

  std::vector<wire::RoundTranscript> transcripts_;
  std::vector<fl::GradientUpdate> pending_;
  std::vector<GroundTruthEntry> ground_truth_;
  dp::PrivacyLedger privacy_;
  Metrics metrics_;
  std::uint32_t round_ = 0;
  int next_phase_ = -1;  // index into A, B, C; -1 when no round is open
};

ScenarioResult run_scenario(const ScenarioConfig& config);

struct OverheadReport {
  double ratio = 0.0;  // (T_variant - T_base) / T_base on median times
  double base_median_s = 0.0;
  double variant_median_s = 0.0;
  std::vector<double> base_s;
  std::vector<double> variant_s;
};

// Phase B+C wall time of one run, summed over rounds.
double submission_aggregation_seconds(const Metrics& metrics);

// Runs both configs `repetitions` times (after one warm-up of each) and
// compares median phase B+C wall time. The configs may differ only in
// suite, KEM parameters, and RSA modulus size.
OverheadReport measure_overhead(const ScenarioConfig& base, const ScenarioConfig& variant,
                                std::size_t repetitions = 3);

struct BenchComparison {
  std::string name;
  OverheadReport report;
};

// The comparisons behind `pqfl bench`, all derived from one scenario:
//   pqc_vs_plaintext  suite plaintext -> pqc
//   kem_k3_vs_k2      pqc with the rank-2 KEM -> rank-3 KEM
std::vector<BenchComparison> bench_comparisons(const ScenarioConfig& config, std::size_t repetitions = 3);

}  // namespace pqfl::sim

#endif  // PQFL_SIMNET_HPP_
