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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "test_support.hpp"

namespace pqfl::agg {
namespace {

using testing::seed_from;

std::vector<GradientUpdate> random_updates(std::mt19937_64& gen, std::size_t n, std::size_t d, double spread = 1.0) {
  std::normal_distribution<double> dist(0.0, spread);
  std::vector<GradientUpdate> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(d);
    for (double& x : v) x = dist(gen);
    out.push_back(GradientUpdate::make(static_cast<std::uint32_t>(i), 1, std::move(v)));
  }
  return out;
}

TEST(NearestRank, HandExamples) {
  const std::vector<double> v{15, 20, 35, 40, 50};
  EXPECT_EQ(nearest_rank_percentile(v, 5), 15);
  EXPECT_EQ(nearest_rank_percentile(v, 30), 20);
  EXPECT_EQ(nearest_rank_percentile(v, 40), 20);
  EXPECT_EQ(nearest_rank_percentile(v, 50), 35);
  EXPECT_EQ(nearest_rank_percentile(v, 100), 50);
  // 95th of ten values is the 10th smallest.
  const std::vector<double> ten{10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
  EXPECT_EQ(nearest_rank_percentile(ten, 95), 10);
  EXPECT_EQ(nearest_rank_percentile(ten, 90), 9);
  EXPECT_THROW(nearest_rank_percentile(v, 0), AggError);
  EXPECT_THROW(nearest_rank_percentile(std::vector<double>{}, 50), AggError);
}

TEST(AdaptiveClip, BoundsNormsAndPreservesDirection) {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 50; ++t) {
    const auto ups = random_updates(gen, 10, 6, 1.0 + t);
    const auto out = adaptive_clip(ups, ClipPolicy::adaptive(70));
    std::vector<double> norms;
    for (const auto& u : ups) norms.push_back(fl::l2_norm(u.delta));
    std::sort(norms.begin(), norms.end());
    const double tau = norms[6];  // ceil(0.7 * 10) = 7th smallest
    for (std::size_t i = 0; i < ups.size(); ++i) {
      const double n = fl::l2_norm(out[i].delta);
      ASSERT_LE(n, tau * (1 + 1e-12));
      ASSERT_TRUE(out[i].consistent());
      if (ups[i].norm <= tau) {
        ASSERT_EQ(out[i].delta, ups[i].delta);
      } else {
        ASSERT_NEAR(n, tau, 1e-12 * tau);
        const double ratio = out[i].delta[0] / ups[i].delta[0];
        for (std::size_t j = 0; j < 6; ++j) ASSERT_NEAR(out[i].delta[j], ratio * ups[i].delta[j], 1e-12);
      }
    }
  }
}

TEST(AdaptiveClip, StaticAndNoneModes) {
  const std::vector<GradientUpdate> ups{GradientUpdate::make(0, 0, {3, 4}), GradientUpdate::make(1, 0, {0.3, 0.4})};
  const auto fixed = adaptive_clip(ups, ClipPolicy::fixed(1.0));
  EXPECT_NEAR(fixed[0].delta[0], 0.6, 1e-15);
  EXPECT_NEAR(fixed[0].delta[1], 0.8, 1e-15);
  EXPECT_EQ(fixed[1].delta, ups[1].delta);
  EXPECT_EQ(adaptive_clip(ups, ClipPolicy::none())[0].delta, ups[0].delta);
  EXPECT_TRUE(std::isinf(clip_threshold(ups, ClipPolicy::none())));
  EXPECT_THROW(adaptive_clip(ups, ClipPolicy::fixed(0.0)), AggError);
}

// Column-wise oracle written independently of the library.
std::vector<double> trimmed_oracle(const std::vector<GradientUpdate>& ups, std::size_t k) {
  const std::size_t d = ups[0].delta.size();
  std::vector<double> out(d);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> col;
    for (const auto& u : ups) col.push_back(u.delta[j]);
    std::sort(col.begin(), col.end());
    long double s = 0;
    for (std::size_t i = k; i + k < col.size(); ++i) s += col[i];
    out[j] = static_cast<double>(s / (col.size() - 2 * k));
  }
  return out;
}

TEST(TrimmedMean, MatchesOracleAndIgnoresOutliers) {
  std::mt19937_64 gen(2);
  for (int t = 0; t < 50; ++t) {
    auto ups = random_updates(gen, 10, 5);
    const auto got = trimmed_mean(ups, 0.2);
    const auto want = trimmed_oracle(ups, 2);
    for (std::size_t j = 0; j < 5; ++j) ASSERT_NEAR(got[j], want[j], 1e-12);
  }
  std::vector<GradientUpdate> ups{GradientUpdate::make(0, 0, {1}), GradientUpdate::make(1, 0, {2}),
                                  GradientUpdate::make(2, 0, {3}), GradientUpdate::make(3, 0, {1000}),
                                  GradientUpdate::make(4, 0, {-1000})};
  EXPECT_DOUBLE_EQ(trimmed_mean(ups, 0.2)[0], 2.0);
  EXPECT_DOUBLE_EQ(trimmed_mean(ups, 0.0)[0], coordinate_mean(ups)[0]);
  EXPECT_THROW(trimmed_mean(ups, 0.5), AggError);
}

// Brute-force Krum score.
std::size_t krum_oracle(const std::vector<GradientUpdate>& ups, std::size_t f) {
  std::size_t best = 0;
  double best_score = INFINITY;
  for (std::size_t i = 0; i < ups.size(); ++i) {
    std::vector<double> d;
    for (std::size_t j = 0; j < ups.size(); ++j) {
      if (i == j) continue;
      double s = 0;
      for (std::size_t k = 0; k < ups[i].delta.size(); ++k) s += std::pow(ups[i].delta[k] - ups[j].delta[k], 2);
      d.push_back(s);
    }
    std::sort(d.begin(), d.end());
    double score = 0;
    for (std::size_t k = 0; k < ups.size() - f - 2; ++k) score += d[k];
    if (score < best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

TEST(Krum, MatchesBruteForceAndRejectsOutliers) {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 50; ++t) {
    auto ups = random_updates(gen, 9, 4);
    ASSERT_EQ(krum(ups, 2).client_id, ups[krum_oracle(ups, 2)].client_id);
  }
  auto ups = random_updates(gen, 7, 3, 0.1);
  for (double& v : ups[0].delta) v = 50;
  ups[0] = GradientUpdate::make(0, 1, ups[0].delta);
  for (double& v : ups[1].delta) v = -50;
  ups[1] = GradientUpdate::make(1, 1, ups[1].delta);
  EXPECT_GE(krum(ups, 2).client_id, 2u);
  EXPECT_THROW(krum(ups, 3), AggError);
}

TEST(Momentum, ExponentialAverage) {
  const std::vector<double> m{1.0, 2.0};
  const std::vector<double> a{3.0, -2.0};
  const MomentumStep s = momentum_normalize(m, a, 0.5);
  EXPECT_EQ(s.momentum, (std::vector<double>{2.0, 0.0}));
  EXPECT_EQ(s.emitted, s.momentum);
  EXPECT_EQ(momentum_normalize(m, a, 0.0).emitted, a);
  EXPECT_THROW(momentum_normalize(m, a, 1.0), AggError);
}

TEST(MeanAndSum, FoldInClientOrder) {
  std::vector<GradientUpdate> ups{GradientUpdate::make(2, 0, {1e16}), GradientUpdate::make(0, 0, {1.0}),
                                  GradientUpdate::make(1, 0, {-1e16})};
  std::vector<GradientUpdate> shuffled{ups[1], ups[2], ups[0]};
  EXPECT_EQ(coordinate_sum(ups), coordinate_sum(shuffled));
  EXPECT_EQ(coordinate_sum(ups)[0], (1.0 + -1e16) + 1e16);
  EXPECT_THROW(coordinate_mean(std::vector<GradientUpdate>{}), AggError);
}

class SecureAggregation : public ::testing::Test {
 protected:
  void SetUp() override {
    kem_keys_ = kem::kem_keygen(kem::default_kem_params(), seed_from(900));
    for (std::uint32_t c = 0; c < 5; ++c) {
      sig_keys_.push_back(sig::sig_keygen(sig::SigParams{}, seed_from(910 + c)));
      verify_.emplace(c, sig_keys_.back().pub);
    }
  }

  wire::SignedCipherUpdate seal(const GradientUpdate& u) {
    return seal_update(u, kem_keys_.pub, sig_keys_[u.client_id], seed_from(1000 + u.client_id),
                       seed_from(2000 + u.client_id), quant::Quantizer());
  }

  kem::KemKeyPair kem_keys_;
  std::vector<sig::SigKeyPair> sig_keys_;
  VerifyKeyMap verify_;
};

TEST_F(SecureAggregation, MatchesPlainMeanWithinQuantization) {
  std::mt19937_64 gen(4);
  const auto ups = random_updates(gen, 5, 9, 0.5);
  std::vector<wire::SignedCipherUpdate> subs;
  for (const auto& u : ups) subs.push_back(seal(u));
  const GlobalUpdate g = verified_secure_aggregate(subs, verify_, kem_keys_, AggRule::mean(), ClipPolicy::none());
  const auto plain = coordinate_mean(ups);
  for (std::size_t j = 0; j < 9; ++j) EXPECT_LE(std::abs(g.vector[j] - plain[j]), 0.5 / 1024);
  EXPECT_EQ(g.contributors, (std::vector<std::uint32_t>{0, 1, 2, 3, 4}));
  EXPECT_TRUE(g.excluded.empty());

  std::reverse(subs.begin(), subs.end());
  EXPECT_EQ(verified_secure_aggregate(subs, verify_, kem_keys_, AggRule::mean(), ClipPolicy::none()).vector,
            g.vector);
}

TEST_F(SecureAggregation, InvalidSignatureIsExcluded) {
  std::mt19937_64 gen(5);
  const auto ups = random_updates(gen, 5, 4, 0.5);
  std::vector<wire::SignedCipherUpdate> subs;
  for (const auto& u : ups) subs.push_back(seal(u));
  subs[2].payload[0] ^= 1;

  const GlobalUpdate g = verified_secure_aggregate(subs, verify_, kem_keys_, AggRule::mean(), ClipPolicy::none());
  EXPECT_EQ(g.excluded, (std::vector<std::uint32_t>{2}));
  EXPECT_EQ(g.contributors, (std::vector<std::uint32_t>{0, 1, 3, 4}));

  // Oracle: mean of the four honest dequantized deltas, folded in id order.
  const quant::Quantizer q;
  std::vector<double> want(4, 0.0);
  for (std::size_t c : {0u, 1u, 3u, 4u}) {
    for (std::size_t j = 0; j < 4; ++j) want[j] += q.dequantize(q.quantize(ups[c].delta[j]));
  }
  for (double& v : want) v /= 4.0;
  EXPECT_EQ(g.vector, want);
}

TEST_F(SecureAggregation, DuplicatesWrongKeysAndBadShapes) {
  std::mt19937_64 gen(6);
  const auto ups = random_updates(gen, 5, 4, 0.5);
  std::vector<wire::SignedCipherUpdate> subs{seal(ups[0]), seal(ups[1]), seal(ups[1])};
  GlobalUpdate g = verified_secure_aggregate(subs, verify_, kem_keys_, AggRule::mean(), ClipPolicy::none());
  EXPECT_EQ(g.excluded, (std::vector<std::uint32_t>{1}));

  // Client 3 signs with client 4's key.
  wire::SignedCipherUpdate forged = seal(ups[3]);
  forged.signature = sig::sig_sign(sig_keys_[4], forged.signed_portion(), seed_from(1)).to_bytes(sig::SigParams{});
  g = verified_secure_aggregate(std::vector{seal(ups[0]), forged}, verify_, kem_keys_, AggRule::mean(),
                                ClipPolicy::none());
  EXPECT_EQ(g.excluded, (std::vector<std::uint32_t>{3}));

  const auto short_update = GradientUpdate::make(2, 1, {0.1, 0.2, 0.3});
  g = verified_secure_aggregate(std::vector{seal(ups[0]), seal(short_update)}, verify_, kem_keys_, AggRule::mean(),
                                ClipPolicy::none(), quant::Quantizer(), 4);
  EXPECT_EQ(g.excluded, (std::vector<std::uint32_t>{2}));
  EXPECT_EQ(g.contributors, (std::vector<std::uint32_t>{0}));
}

TEST_F(SecureAggregation, ErrorsWhenNothingSurvivesOrKeyIsUnknown) {
  std::mt19937_64 gen(7);
  const auto ups = random_updates(gen, 2, 3);
  auto bad = seal(ups[0]);
  bad.signature.back() ^= 0x80;
  EXPECT_THROW(verified_secure_aggregate(std::vector{bad}, verify_, kem_keys_, AggRule::mean(), ClipPolicy::none()),
               AggError);
  auto stranger = seal(ups[1]);
  stranger.client_id = 77;
  EXPECT_THROW(
      verified_secure_aggregate(std::vector{stranger}, verify_, kem_keys_, AggRule::mean(), ClipPolicy::none()),
      AggError);
  EXPECT_THROW(verified_secure_aggregate(std::vector<wire::SignedCipherUpdate>{}, verify_, kem_keys_,
                                         AggRule::mean(), ClipPolicy::none()),
               AggError);
}

}  // namespace
}  // namespace pqfl::agg
