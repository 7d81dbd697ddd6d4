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

#include "pqfl/fl.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

namespace pqfl::fl {
namespace {

Dataset tiny() {
  Dataset d;
  d.dim = 2;
  d.features = {1.0, 2.0, -1.0, 0.5, 0.3, -2.0, -0.7, -0.1};
  d.labels = {1, 0, 1, 0};
  return d;
}

TEST(Synthetic, DeterministicShapedAndSeedSensitive) {
  const auto a = generate_synthetic_threat_data(7, 3, 50, 4, 4.0);
  const auto b = generate_synthetic_threat_data(7, 3, 50, 4, 4.0);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].features, b[i].features);
    EXPECT_EQ(a[i].labels, b[i].labels);
    EXPECT_EQ(a[i].size(), 50u);
    EXPECT_EQ(a[i].features.size(), 200u);
    EXPECT_NO_THROW(a[i].validate());
  }
  EXPECT_NE(a[0].features, generate_synthetic_threat_data(8, 3, 50, 4, 4.0)[0].features);
  EXPECT_THROW(generate_synthetic_threat_data(1, 0, 10, 4, 1.0), FlError);
  EXPECT_THROW(generate_synthetic_threat_data(1, 2, 10, 1, 1.0), FlError);
  EXPECT_THROW(generate_synthetic_threat_data(1, 2, 10, 4, -1.0), FlError);
}

TEST(Synthetic, ClassMeansAreSeparated) {
  const double separation = 6.0;
  const auto parts = generate_synthetic_threat_data(3, 4, 2000, 5, separation);
  const Dataset all = concat(parts);
  std::vector<double> m0(5, 0.0), m1(5, 0.0);
  double n0 = 0, n1 = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto& m = all.labels[i] == 1 ? m1 : m0;
    (all.labels[i] == 1 ? n1 : n0) += 1;
    for (std::size_t j = 0; j < 5; ++j) m[j] += all.row(i)[j];
  }
  double dist = 0.0;
  for (std::size_t j = 0; j < 5; ++j) dist += std::pow(m1[j] / n1 - m0[j] / n0, 2);
  EXPECT_NEAR(std::sqrt(dist), separation, 0.3);
}

// Central finite differences of mean_loss.
TEST(LossGradient, MatchesFiniteDifferences) {
  const Dataset d = tiny();
  const ModelParams p{{0.3, -0.2}, 0.1};
  const auto g = loss_gradient(p, d);
  ASSERT_EQ(g.size(), 3u);
  const double h = 1e-6;
  for (std::size_t j = 0; j < 3; ++j) {
    ModelParams up = p, dn = p;
    if (j < 2) {
      up.weights[j] += h;
      dn.weights[j] -= h;
    } else {
      up.bias += h;
      dn.bias -= h;
    }
    const double numeric = (mean_loss(up, d) - mean_loss(dn, d)) / (2 * h);
    EXPECT_NEAR(g[j], numeric, 1e-7) << "coordinate " << j;
  }
}

TEST(LocalTrain, FullBatchStepIsNegativeScaledGradient) {
  const Dataset d = tiny();
  const ModelParams p{{0.3, -0.2}, 0.1};
  TrainingConfig cfg;
  cfg.learning_rate = 0.25;
  cfg.batch_size = 100;
  const GradientUpdate u = local_train_step(p, d, cfg, 1, 4, 9);
  const auto g = loss_gradient(p, d);
  ASSERT_EQ(u.delta.size(), 3u);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(u.delta[j], -0.25 * g[j], 1e-15);
  EXPECT_EQ(u.client_id, 4u);
  EXPECT_EQ(u.round, 9u);
  EXPECT_TRUE(u.consistent());
  EXPECT_DOUBLE_EQ(u.norm, l2_norm(u.delta));
}

TEST(LocalTrain, DeterministicGivenSeed) {
  const auto data = generate_synthetic_threat_data(1, 1, 100, 6, 3.0);
  const ModelParams p = ModelParams::zeros(6);
  TrainingConfig cfg;
  cfg.batch_size = 8;
  cfg.local_epochs = 2;
  EXPECT_EQ(local_train_step(p, data[0], cfg, 5).delta, local_train_step(p, data[0], cfg, 5).delta);
  EXPECT_NE(local_train_step(p, data[0], cfg, 5).delta, local_train_step(p, data[0], cfg, 6).delta);
}

TEST(LocalTrain, ConvergesOnSeparableData) {
  const auto parts = generate_synthetic_threat_data(11, 1, 400, 8, 4.0);
  ModelParams p = ModelParams::zeros(8);
  const double start = mean_loss(p, parts[0]);
  for (int r = 0; r < 20; ++r) {
    p = apply_global_update(p, local_train_step(p, parts[0], TrainingConfig{}, r).delta);
  }
  EXPECT_LT(mean_loss(p, parts[0]), start);
  EXPECT_GE(evaluate(p, parts[0]).accuracy, 0.9);
}

TEST(LocalTrain, RejectsBadInput) {
  const Dataset d = tiny();
  TrainingConfig cfg;
  cfg.learning_rate = 0.0;
  EXPECT_THROW(local_train_step(ModelParams::zeros(2), d, cfg, 1), FlError);
  EXPECT_THROW(local_train_step(ModelParams::zeros(3), d, TrainingConfig{}, 1), FlError);
  EXPECT_THROW(local_train_step(ModelParams::zeros(2), Dataset{2, {}, {}}, TrainingConfig{}, 1), FlError);
}

TEST(GradientUpdate, ConsistencyCatchesTampering) {
  GradientUpdate u = GradientUpdate::make(1, 2, {3.0, 4.0});
  EXPECT_DOUBLE_EQ(u.norm, 5.0);
  EXPECT_TRUE(u.consistent());
  u.delta[0] = 0.0;
  EXPECT_FALSE(u.consistent());
  u = GradientUpdate::make(1, 2, {std::numeric_limits<double>::quiet_NaN(), 1.0});
  EXPECT_FALSE(u.consistent());
}

TEST(ApplyGlobalUpdate, AddsAndValidates) {
  const ModelParams p{{1.0, 2.0}, 3.0};
  const std::vector<double> agg{0.5, -1.0, 0.25};
  EXPECT_EQ(apply_global_update(p, agg), (ModelParams{{1.5, 1.0}, 3.25}));
  EXPECT_THROW(apply_global_update(p, std::vector<double>{1.0}), FlError);
  EXPECT_THROW(apply_global_update(p, std::vector<double>{1.0, INFINITY, 0.0}), FlError);
}

TEST(Evaluate, CountsThresholdedPredictions) {
  const Dataset d = tiny();
  // Labels follow the sign of x0 exactly.
  const ModelParams p{{1.0, 0.0}, 0.0};
  const Evaluation e = evaluate(p, d);
  EXPECT_DOUBLE_EQ(e.accuracy, 1.0);
  EXPECT_GT(e.loss, 0.0);
  EXPECT_DOUBLE_EQ(evaluate(ModelParams{{-1.0, 0.0}, 0.0}, d).accuracy, 0.0);
  EXPECT_DOUBLE_EQ(evaluate(ModelParams{{0.0, 1.0}, 0.0}, d).accuracy, 0.5);
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_NEAR(sigmoid(-800.0), 0.0, 1e-300);
  EXPECT_DOUBLE_EQ(sigmoid(800.0), 1.0);
}

TEST(DatasetCsv, RoundtripsExactly) {
  const auto parts = generate_synthetic_threat_data(2, 1, 30, 3, 2.0);
  std::stringstream ss;
  write_dataset_csv(parts[0], ss);
  const Dataset back = read_dataset_csv(ss);
  EXPECT_EQ(back.dim, 3u);
  EXPECT_EQ(back.features, parts[0].features);
  EXPECT_EQ(back.labels, parts[0].labels);

  std::stringstream bad("f0,f1,label\n1.0,abc,1\n");
  EXPECT_THROW(read_dataset_csv(bad), FlError);
  std::stringstream short_row("f0,f1,label\n1.0,1\n");
  EXPECT_THROW(read_dataset_csv(short_row), FlError);
  std::stringstream bad_label("f0,label\n1.0,2\n");
  EXPECT_THROW(read_dataset_csv(bad_label), FlError);
}

}  // namespace
}  // namespace pqfl::fl
