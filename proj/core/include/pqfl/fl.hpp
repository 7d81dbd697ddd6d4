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

// Local training for the federated threat classifier: synthetic per-client
// threat data, logistic regression with binary cross-entropy, mini-batch
// SGD producing parameter deltas, and evaluation.

#ifndef PQFL_FL_HPP_
#define PQFL_FL_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace pqfl::fl {

class FlError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Row-major feature matrix with binary labels (0 benign, 1 malicious).
struct Dataset {
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  std::span<const double> row(std::size_t i) const { return {features.data() + i * dim, dim}; }
  void validate() const;
};

struct ModelParams {
  std::vector<double> weights;
  double bias = 0.0;

  static ModelParams zeros(std::size_t dim) { return {std::vector<double>(dim, 0.0), 0.0}; }
  std::size_t dim() const { return weights.size(); }
  // weights || bias
  std::vector<double> flatten() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

double l2_norm(std::span<const double> v);

// One client's model delta w_i(t). delta = weights || bias.
struct GradientUpdate {
  std::uint32_t client_id = 0;
  std::uint32_t round = 0;
  std::vector<double> delta;
  double norm = 0.0;

  static GradientUpdate make(std::uint32_t client_id, std::uint32_t round, std::vector<double> delta);
  // Norm agrees with the recomputed norm and every entry is finite.
  bool consistent() const;
};

struct TrainingConfig {
  double learning_rate = 0.1;
  std::size_t local_epochs = 1;
  std::size_t batch_size = 32;

  void validate() const;
  friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

double sigmoid(double z);

std::vector<Dataset> generate_synthetic_threat_data(std::uint64_t seed, std::size_t n_clients,
                                                    std::size_t samples_per_client, std::size_t d,
                                                    double separation);

// Mean binary cross-entropy gradient over the dataset, weights || bias.
std::vector<double> loss_gradient(const ModelParams& params, const Dataset& data);
double mean_loss(const ModelParams& params, const Dataset& data);

GradientUpdate local_train_step(const ModelParams& params, const Dataset& data, const TrainingConfig& cfg,
                                std::uint64_t rng_seed, std::uint32_t client_id = 0, std::uint32_t round = 0);

ModelParams apply_global_update(const ModelParams& params, std::span<const double> agg);

struct Evaluation {
  double accuracy = 0.0;
  double loss = 0.0;
};

// Predicts malicious when sigmoid(w.x + b) >= 0.5.
Evaluation evaluate(const ModelParams& params, const Dataset& data);

Dataset concat(std::span<const Dataset> parts);

// CSV with header f0,...,f{d-1},label.
void write_dataset_csv(const Dataset& data, std::ostream& out);
Dataset read_dataset_csv(std::istream& in);

}  // namespace pqfl::fl

#endif  // PQFL_FL_HPP_
