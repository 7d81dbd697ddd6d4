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

#include "pqfl/robust_agg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace pqfl::agg {
namespace {

std::size_t common_dim(std::span<const GradientUpdate> updates) {
  if (updates.empty()) throw AggError("no updates to aggregate");
  const std::size_t d = updates.front().delta.size();
  for (const GradientUpdate& u : updates) {
    if (u.delta.size() != d) throw AggError("updates have different dimensions");
  }
  return d;
}

std::vector<const GradientUpdate*> sorted_by_client(std::span<const GradientUpdate> updates) {
  std::vector<const GradientUpdate*> out;
  out.reserve(updates.size());
  for (const GradientUpdate& u : updates) out.push_back(&u);
  std::stable_sort(out.begin(), out.end(),
                   [](const GradientUpdate* a, const GradientUpdate* b) { return a->client_id < b->client_id; });
  return out;
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

void ClipPolicy::validate() const {
  if (mode == ClipMode::kStatic && !(threshold > 0.0 && std::isfinite(threshold))) {
    throw AggError("clip.threshold must be positive");
  }
  if (mode == ClipMode::kAdaptivePercentile && !(percentile > 0.0 && percentile <= 100.0)) {
    throw AggError("clip.percentile must lie in (0, 100]");
  }
  if (!(momentum_beta >= 0.0 && momentum_beta < 1.0)) throw AggError("clip.momentum_beta must lie in [0, 1)");
}

void AggRule::validate() const {
  if (kind == AggKind::kTrimmedMean && !(trim_fraction >= 0.0 && trim_fraction < 0.5)) {
    throw AggError("trimmed-mean fraction must lie in [0, 0.5)");
  }
}

double nearest_rank_percentile(std::span<const double> values, double percentile) {
  if (values.empty()) throw AggError("percentile of an empty list");
  if (!(percentile > 0.0 && percentile <= 100.0)) throw AggError("percentile must lie in (0, 100]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  // Guard against p/100 * n landing a hair above an integer.
  const double rank_real = percentile / 100.0 * static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(rank_real - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

double clip_threshold(std::span<const GradientUpdate> updates, const ClipPolicy& policy) {
  policy.validate();
  if (updates.empty()) throw AggError("cannot clip an empty update list");
  switch (policy.mode) {
    case ClipMode::kNone:
      return std::numeric_limits<double>::infinity();
    case ClipMode::kStatic:
      return policy.threshold;
    case ClipMode::kAdaptivePercentile: {
      std::vector<double> norms;
      norms.reserve(updates.size());
      for (const GradientUpdate& u : updates) norms.push_back(u.norm);
      return nearest_rank_percentile(norms, policy.percentile);
    }
  }
  return std::numeric_limits<double>::infinity();
}

std::vector<GradientUpdate> adaptive_clip(std::span<const GradientUpdate> updates, const ClipPolicy& policy) {
  const double tau = clip_threshold(updates, policy);
  std::vector<GradientUpdate> out(updates.begin(), updates.end());
  for (GradientUpdate& u : out) {
    if (u.norm > tau) {
      const double factor = tau / u.norm;
      for (double& v : u.delta) v *= factor;
      u.norm = tau;
    }
  }
  return out;
}

MomentumStep momentum_normalize(std::span<const double> momentum, std::span<const double> aggregate, double beta) {
  if (momentum.size() != aggregate.size()) throw AggError("momentum and aggregate dimensions differ");
  if (!(beta >= 0.0 && beta < 1.0)) throw AggError("momentum beta must lie in [0, 1)");
  MomentumStep step;
  step.momentum.resize(momentum.size());
  for (std::size_t i = 0; i < momentum.size(); ++i) step.momentum[i] = beta * momentum[i] + (1.0 - beta) * aggregate[i];
  step.emitted = step.momentum;
  return step;
}

std::vector<double> coordinate_sum(std::span<const GradientUpdate> updates) {
  const std::size_t d = common_dim(updates);
  std::vector<double> sum(d, 0.0);
  for (const GradientUpdate* u : sorted_by_client(updates)) {
    for (std::size_t i = 0; i < d; ++i) sum[i] += u->delta[i];
  }
  return sum;
}

std::vector<double> coordinate_mean(std::span<const GradientUpdate> updates) {
  std::vector<double> mean = coordinate_sum(updates);
  for (double& v : mean) v /= static_cast<double>(updates.size());
  return mean;
}

std::vector<double> trimmed_mean(std::span<const GradientUpdate> updates, double fraction) {
  const std::size_t d = common_dim(updates);
  if (!(fraction >= 0.0 && fraction < 0.5)) throw AggError("trimmed-mean fraction must lie in [0, 0.5)");
  const std::size_t n = updates.size();
  const auto trim = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
  if (n <= 2 * trim) throw AggError("trimmed mean would discard every value");

  std::vector<double> out(d);
  std::vector<double> column(n);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < n; ++j) column[j] = updates[j].delta[i];
    std::sort(column.begin(), column.end());
    double s = 0.0;
    for (std::size_t j = trim; j < n - trim; ++j) s += column[j];
    out[i] = s / static_cast<double>(n - 2 * trim);
  }
  return out;
}

GradientUpdate krum(std::span<const GradientUpdate> updates, std::size_t f) {
  const std::size_t n = updates.size();
  if (n < 2 * f + 3) throw AggError("krum requires n >= 2f + 3");
  common_dim(updates);
  const auto order = sorted_by_client(updates);
  const std::size_t neighbours = n - f - 2;

  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  std::vector<double> dists;
  for (std::size_t i = 0; i < n; ++i) {
    dists.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dists.push_back(squared_distance(order[i]->delta, order[j]->delta));
    }
    std::sort(dists.begin(), dists.end());
    const double score = std::accumulate(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(neighbours), 0.0);
    if (score < best_score) {
      best_score = score;
      best = i;
    }
  }
  return *order[best];
}

std::vector<double> apply_rule(std::span<const GradientUpdate> updates, const AggRule& rule) {
  rule.validate();
  switch (rule.kind) {
    case AggKind::kMean:
      return coordinate_mean(updates);
    case AggKind::kSum:
      return coordinate_sum(updates);
    case AggKind::kTrimmedMean:
      return trimmed_mean(updates, rule.trim_fraction);
    case AggKind::kKrum:
      return krum(updates, rule.krum_f).delta;
  }
  throw AggError("unknown aggregation rule");
}

GlobalUpdate aggregate_plain(std::span<const GradientUpdate> updates, const AggRule& rule, const ClipPolicy& policy) {
  if (updates.empty()) throw AggError("no verified contributors");
  const auto clipped = adaptive_clip(updates, policy);
  GlobalUpdate g;
  g.vector = apply_rule(clipped, rule);
  for (const GradientUpdate* u : sorted_by_client(updates)) g.contributors.push_back(u->client_id);
  return g;
}

wire::SignedCipherUpdate seal_update(const GradientUpdate& update, const kem::KemPublicKey& aggregator_key,
                                     const sig::SigKeyPair& client_key, const Seed32& kem_seed,
                                     const Seed32& sig_seed, const quant::Quantizer& quantizer) {
  const kem::Encapsulation enc = kem::kem_encapsulate(aggregator_key, kem_seed);
  wire::SignedCipherUpdate out;
  out.round = update.round;
  out.client_id = update.client_id;
  out.kem_ciphertext = enc.ct.to_bytes(aggregator_key.params);
  out.payload = wire::apply_keystream(enc.secret, update.round, update.client_id, quantizer.encode(update.delta));
  out.signature = sig::sig_sign(client_key, out.signed_portion(), sig_seed).to_bytes(client_key.pub.params);
  return out;
}

GlobalUpdate verified_secure_aggregate(std::span<const wire::SignedCipherUpdate> submissions,
                                       const VerifyKeyMap& verify_keys, const kem::KemKeyPair& kem_keys,
                                       const AggRule& rule, const ClipPolicy& policy,
                                       const quant::Quantizer& quantizer, std::optional<std::size_t> expected_dim) {
  if (submissions.empty()) throw AggError("no submissions to aggregate");
  rule.validate();
  policy.validate();

  std::vector<const wire::SignedCipherUpdate*> order;
  for (const auto& s : submissions) {
    if (!verify_keys.contains(s.client_id)) throw AggError("no verification key for client " + std::to_string(s.client_id));
    order.push_back(&s);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* a, const auto* b) { return a->client_id < b->client_id; });

  GlobalUpdate g;
  std::vector<GradientUpdate> accepted;
  std::set<std::uint32_t> seen;
  for (const wire::SignedCipherUpdate* s : order) {
    const bool duplicate = !seen.insert(s->client_id).second;
    const sig::SigPublicKey& vk = verify_keys.at(s->client_id);
    if (duplicate || !sig::sig_verify(vk, s->signed_portion(), ByteView(s->signature))) {
      g.excluded.push_back(s->client_id);
      continue;
    }
    try {
      const auto ct = kem::KemCiphertext::from_bytes(kem_keys.pub.params, s->kem_ciphertext);
      const kem::SharedSecret secret = kem::kem_decapsulate(kem_keys, ct);
      auto delta = quantizer.decode(wire::apply_keystream(secret, s->round, s->client_id, s->payload));
      if (expected_dim && delta.size() != *expected_dim) throw DecodeError("payload dimension mismatch");
      if (!accepted.empty() && delta.size() != accepted.front().delta.size()) {
        throw DecodeError("payload dimension mismatch");
      }
      accepted.push_back(GradientUpdate::make(s->client_id, s->round, std::move(delta)));
      g.contributors.push_back(s->client_id);
    } catch (const DecodeError&) {
      g.excluded.push_back(s->client_id);
    } catch (const kem::KemError&) {
      g.excluded.push_back(s->client_id);
    }
  }
  if (accepted.empty()) throw AggError("no verified contributors");

  const auto clipped = adaptive_clip(accepted, policy);
  g.vector = apply_rule(clipped, rule);
  return g;
}

}  // namespace pqfl::agg
