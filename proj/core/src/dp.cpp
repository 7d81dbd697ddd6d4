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

#include "pqfl/dp.hpp"

#include <cmath>

#include "pqfl/rng.hpp"

namespace pqfl::dp {

void NoiseMechanism::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DpError("dp.epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw DpError("dp.delta must lie in (0, 1)");
  if (!(clip_c > 0.0) || !std::isfinite(clip_c)) throw DpError("dp.clip must be positive");
}

double NoiseMechanism::sigma() const { return gaussian_sigma(epsilon, delta, clip_c); }

double gaussian_sigma(double epsilon, double delta, double clip_c) {
  return clip_c * std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

fl::GradientUpdate clip_to_norm(const fl::GradientUpdate& update, double clip_c) {
  fl::GradientUpdate out = update;
  const double norm = fl::l2_norm(out.delta);
  if (norm > clip_c) {
    const double factor = clip_c / norm;
    for (double& v : out.delta) v *= factor;
  }
  out.norm = fl::l2_norm(out.delta);
  return out;
}

fl::GradientUpdate dp_sanitize(const fl::GradientUpdate& update, const NoiseMechanism& mech, std::uint64_t rng_seed) {
  mech.validate();
  if (!mech.enabled) return update;
  fl::GradientUpdate out = clip_to_norm(update, mech.clip_c);
  const double sigma = mech.sigma();
  Rng rng(rng_seed);
  for (double& v : out.delta) v += sigma * rng.normal();
  out.norm = fl::l2_norm(out.delta);
  return out;
}

PrivacyLedger compose_budget(PrivacyLedger ledger, PrivacySpend spend) {
  if (!(spend.epsilon > 0.0) || !(spend.delta >= 0.0)) throw DpError("privacy spend must be positive");
  ledger.per_round.push_back(spend);
  ledger.total_epsilon += spend.epsilon;
  ledger.total_delta += spend.delta;
  return ledger;
}

}  // namespace pqfl::dp
