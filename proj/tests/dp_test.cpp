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

#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>

namespace pqfl::dp {
namespace {

NoiseMechanism enabled(double eps = 1.0, double delta = 1e-5, double c = 1.0) {
  return NoiseMechanism{eps, delta, c, true};
}

TEST(GaussianSigma, ClosedForm) {
  EXPECT_NEAR(gaussian_sigma(1.0, 1e-5, 1.0), 4.8448, 1e-4);
  EXPECT_DOUBLE_EQ(gaussian_sigma(2.0, 1e-5, 3.0), 1.5 * gaussian_sigma(1.0, 1e-5, 1.0));
  EXPECT_DOUBLE_EQ(enabled().sigma(), gaussian_sigma(1.0, 1e-5, 1.0));
}

TEST(NoiseMechanism, Validation) {
  EXPECT_NO_THROW(enabled().validate());
  EXPECT_THROW(enabled(0.0).validate(), DpError);
  EXPECT_THROW(enabled(1.0, 1.0).validate(), DpError);
  EXPECT_THROW(enabled(1.0, 0.0).validate(), DpError);
  EXPECT_THROW(enabled(1.0, 1e-5, -1.0).validate(), DpError);
}

TEST(ClipToNorm, ScalesOnlyLargeUpdates) {
  const auto big = clip_to_norm(fl::GradientUpdate::make(1, 2, {6.0, 8.0}), 2.0);
  EXPECT_NEAR(big.delta[0], 1.2, 1e-15);
  EXPECT_NEAR(big.delta[1], 1.6, 1e-15);
  EXPECT_NEAR(big.norm, 2.0, 1e-15);
  EXPECT_EQ(big.client_id, 1u);
  const auto small = clip_to_norm(fl::GradientUpdate::make(1, 2, {0.6, 0.8}), 2.0);
  EXPECT_EQ(small.delta, (std::vector<double>{0.6, 0.8}));
}

TEST(DpSanitize, DisabledIsIdentity) {
  NoiseMechanism off;
  const auto u = fl::GradientUpdate::make(0, 0, {5.0, 5.0});
  EXPECT_EQ(dp_sanitize(u, off, 1).delta, u.delta);
}

TEST(DpSanitize, DeterministicPerSeed) {
  const auto u = fl::GradientUpdate::make(0, 0, {0.1, 0.2, 0.3});
  EXPECT_EQ(dp_sanitize(u, enabled(), 9).delta, dp_sanitize(u, enabled(), 9).delta);
  EXPECT_NE(dp_sanitize(u, enabled(), 9).delta, dp_sanitize(u, enabled(), 10).delta);
  EXPECT_TRUE(dp_sanitize(u, enabled(), 9).consistent());
}

// Kolmogorov-Smirnov against N(0, sigma^2) on the residual after clipping.
TEST(DpSanitize, NoiseIsGaussianWithTheRightScale) {
  const NoiseMechanism mech = enabled();
  const auto u = fl::GradientUpdate::make(0, 0, {3.0, 4.0, 0.0, 0.0});
  const auto clipped = clip_to_norm(u, mech.clip_c);
  std::vector<double> residuals;
  for (std::uint64_t s = 0; s < 5000; ++s) {
    const auto noisy = dp_sanitize(u, mech, s);
    for (std::size_t j = 0; j < 4; ++j) residuals.push_back(noisy.delta[j] - clipped.delta[j]);
  }
  std::sort(residuals.begin(), residuals.end());
  const boost::math::normal dist(0.0, mech.sigma());
  const double n = static_cast<double>(residuals.size());
  double d = 0.0;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    const double f = boost::math::cdf(dist, residuals[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  // Critical value at alpha = 0.001.
  EXPECT_LT(d, 1.95 / std::sqrt(n));
}

TEST(ComposeBudget, BasicCompositionAddsUp) {
  PrivacyLedger l;
  for (int r = 0; r < 10; ++r) l = compose_budget(l, {1.0, 1e-5});
  EXPECT_EQ(l.per_round.size(), 10u);
  EXPECT_DOUBLE_EQ(l.total_epsilon, 10.0);
  EXPECT_NEAR(l.total_delta, 1e-4, 1e-18);
  EXPECT_THROW(compose_budget(l, {0.0, 0.0}), DpError);
}

}  // namespace
}  // namespace pqfl::dp
