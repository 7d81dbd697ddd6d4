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

// Client-side Gaussian mechanism (clip to L2 norm C, then add N(0, sigma^2)
// per coordinate) and basic-composition budget accounting.

#ifndef PQFL_DP_HPP_
#define PQFL_DP_HPP_

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pqfl/fl.hpp"

namespace pqfl::dp {

class DpError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct NoiseMechanism {
  double epsilon = 1.0;
  double delta = 1e-5;
  double clip_c = 1.0;
  bool enabled = false;

  void validate() const;
  // C * sqrt(2 ln(1.25 / delta)) / epsilon
  double sigma() const;

  friend bool operator==(const NoiseMechanism&, const NoiseMechanism&) = default;
};

double gaussian_sigma(double epsilon, double delta, double clip_c);

// Rescales the update to L2 norm <= clip_c.
fl::GradientUpdate clip_to_norm(const fl::GradientUpdate& update, double clip_c);

fl::GradientUpdate dp_sanitize(const fl::GradientUpdate& update, const NoiseMechanism& mech, std::uint64_t rng_seed);

struct PrivacySpend {
  double epsilon = 0.0;
  double delta = 0.0;
};

struct PrivacyLedger {
  std::vector<PrivacySpend> per_round;
  double total_epsilon = 0.0;
  double total_delta = 0.0;
};

PrivacyLedger compose_budget(PrivacyLedger ledger, PrivacySpend spend);

}  // namespace pqfl::dp

#endif  // PQFL_DP_HPP_
