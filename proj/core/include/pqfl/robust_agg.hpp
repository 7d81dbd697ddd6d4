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

// Byzantine-robust aggregation and the signature-gated secure aggregation
// pipeline run by the (semi-trusted) aggregator.

#ifndef PQFL_ROBUST_AGG_HPP_
#define PQFL_ROBUST_AGG_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pqfl/fl.hpp"
#include "pqfl/kem.hpp"
#include "pqfl/quantize.hpp"
#include "pqfl/sig.hpp"
#include "pqfl/wire.hpp"

namespace pqfl::agg {

class AggError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using fl::GradientUpdate;

enum class ClipMode { kNone, kStatic, kAdaptivePercentile };

struct ClipPolicy {
  ClipMode mode = ClipMode::kNone;
  double threshold = 1.0;    // static mode
  double percentile = 95.0;  // adaptive mode, in (0, 100]
  double momentum_beta = 0.0;

  static ClipPolicy none() { return {}; }
  static ClipPolicy fixed(double threshold) { return {ClipMode::kStatic, threshold, 95.0, 0.0}; }
  static ClipPolicy adaptive(double percentile = 95.0) { return {ClipMode::kAdaptivePercentile, 1.0, percentile, 0.0}; }

  void validate() const;
  friend bool operator==(const ClipPolicy&, const ClipPolicy&) = default;
};

// kSum is the literal unnormalised sum over verified contributors; it is
// kept for tests and is not selectable from scenario configs.
enum class AggKind { kMean, kTrimmedMean, kKrum, kSum };

struct AggRule {
  AggKind kind = AggKind::kMean;
  double trim_fraction = 0.0;
  std::size_t krum_f = 0;

  static AggRule mean() { return {}; }
  static AggRule trimmed_mean(double fraction) { return {AggKind::kTrimmedMean, fraction, 0}; }
  static AggRule krum(std::size_t f) { return {AggKind::kKrum, 0.0, f}; }
  static AggRule sum() { return {AggKind::kSum, 0.0, 0}; }

  void validate() const;
  friend bool operator==(const AggRule&, const AggRule&) = default;
};

struct GlobalUpdate {
  std::vector<double> vector;
  std::vector<std::uint32_t> contributors;
  std::vector<std::uint32_t> excluded;
};

// Nearest-rank percentile: the ceil(p/100 * n)-th smallest norm.
double nearest_rank_percentile(std::span<const double> values, double percentile);

// The clipping threshold tau the policy would apply to these updates;
// +infinity when clipping is off.
double clip_threshold(std::span<const GradientUpdate> updates, const ClipPolicy& policy);

// Rescales every update whose norm exceeds tau to norm exactly tau.
std::vector<GradientUpdate> adaptive_clip(std::span<const GradientUpdate> updates, const ClipPolicy& policy);

struct MomentumStep {
  std::vector<double> momentum;
  std::vector<double> emitted;
};

// m' = beta * m + (1 - beta) * aggregate; the emitted update is m'.
MomentumStep momentum_normalize(std::span<const double> momentum, std::span<const double> aggregate, double beta);

std::vector<double> coordinate_mean(std::span<const GradientUpdate> updates);
std::vector<double> coordinate_sum(std::span<const GradientUpdate> updates);
std::vector<double> trimmed_mean(std::span<const GradientUpdate> updates, double fraction);
GradientUpdate krum(std::span<const GradientUpdate> updates, std::size_t f);

// Applies the rule to already-clipped updates.
std::vector<double> apply_rule(std::span<const GradientUpdate> updates, const AggRule& rule);

// Clip then aggregate; every update is a contributor. Used by the
// non-authenticated suites.
GlobalUpdate aggregate_plain(std::span<const GradientUpdate> updates, const AggRule& rule, const ClipPolicy& policy);

// Client side of the secure pipeline: quantize, encapsulate to the
// aggregator's KEM key, encrypt under the derived keystream, sign.
wire::SignedCipherUpdate seal_update(const GradientUpdate& update, const kem::KemPublicKey& aggregator_key,
                                     const sig::SigKeyPair& client_key, const Seed32& kem_seed,
                                     const Seed32& sig_seed, const quant::Quantizer& quantizer);

using VerifyKeyMap = std::map<std::uint32_t, sig::SigPublicKey>;

// Verify each submission's signature (rejects are excluded), decapsulate,
// decrypt and dequantize the survivors, clip, and apply the rule. The fold
// runs in ascending client_id order. Throws AggError("no verified
// contributors") when nothing survives the gate.
GlobalUpdate verified_secure_aggregate(std::span<const wire::SignedCipherUpdate> submissions,
                                       const VerifyKeyMap& verify_keys, const kem::KemKeyPair& kem_keys,
                                       const AggRule& rule, const ClipPolicy& policy,
                                       const quant::Quantizer& quantizer = quant::Quantizer(),
                                       std::optional<std::size_t> expected_dim = std::nullopt);

}  // namespace pqfl::agg

#endif  // PQFL_ROBUST_AGG_HPP_
