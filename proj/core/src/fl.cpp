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

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "pqfl/rng.hpp"

namespace pqfl::fl {
namespace {

constexpr double kProbClamp = 1e-12;
// Stddev of the per-client shift applied to both class centres.
constexpr double kClientJitter = 0.5;

void require_dims(const ModelParams& params, const Dataset& data) {
  if (params.dim() != data.dim) throw FlError("model and dataset dimensions differ");
}

double logit(const ModelParams& params, std::span<const double> x) {
  double z = params.bias;
  for (std::size_t j = 0; j < x.size(); ++j) z += params.weights[j] * x[j];
  return z;
}

}  // namespace

void Dataset::validate() const {
  if (features.size() != labels.size() * dim) throw FlError("feature rows and labels disagree");
  for (int y : labels) {
    if (y != 0 && y != 1) throw FlError("labels must be 0 or 1");
  }
}

std::vector<double> ModelParams::flatten() const {
  std::vector<double> out(weights);
  out.push_back(bias);
  return out;
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

GradientUpdate GradientUpdate::make(std::uint32_t client_id, std::uint32_t round, std::vector<double> delta) {
  GradientUpdate u{client_id, round, std::move(delta), 0.0};
  u.norm = l2_norm(u.delta);
  return u;
}

bool GradientUpdate::consistent() const {
  for (double x : delta) {
    if (!std::isfinite(x)) return false;
  }
  const double recomputed = l2_norm(delta);
  return std::abs(recomputed - norm) <= 1e-9 * std::max(1.0, recomputed);
}

void TrainingConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw FlError("learning_rate must be positive");
  if (local_epochs < 1) throw FlError("local_epochs must be >= 1");
  if (batch_size < 1) throw FlError("batch_size must be >= 1");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<Dataset> generate_synthetic_threat_data(std::uint64_t seed, std::size_t n_clients,
                                                    std::size_t samples_per_client, std::size_t d,
                                                    double separation) {
  if (n_clients < 1) throw FlError("n_clients must be >= 1");
  if (d < 2) throw FlError("d must be >= 2");
  if (!(separation >= 0.0) || !std::isfinite(separation)) throw FlError("separation must be >= 0");

  Rng rng(derive_seed(seed, {0x7468726561ULL}));
  std::vector<double> direction(d);
  double len = 0.0;
  while (len < 1e-9) {
    for (double& v : direction) v = rng.normal();
    len = l2_norm(direction);
  }
  // ||2 mu|| = separation
  std::vector<double> mu(d);
  for (std::size_t j = 0; j < d; ++j) mu[j] = direction[j] / len * (separation / 2.0);

  std::vector<Dataset> out;
  out.reserve(n_clients);
  for (std::size_t c = 0; c < n_clients; ++c) {
    Rng crng(derive_seed(seed, {0x636c69656e74ULL, c}));
    std::vector<double> jitter(d);
    for (double& v : jitter) v = crng.normal(0.0, kClientJitter);

    Dataset ds;
    ds.dim = d;
    ds.features.reserve(samples_per_client * d);
    ds.labels.reserve(samples_per_client);
    for (std::size_t i = 0; i < samples_per_client; ++i) {
      const int label = static_cast<int>(crng.below(2));
      const double sign = label == 1 ? 1.0 : -1.0;
      for (std::size_t j = 0; j < d; ++j) ds.features.push_back(sign * mu[j] + jitter[j] + crng.normal());
      ds.labels.push_back(label);
    }
    out.push_back(std::move(ds));
  }
  return out;
}

std::vector<double> loss_gradient(const ModelParams& params, const Dataset& data) {
  require_dims(params, data);
  if (data.empty()) throw FlError("empty dataset");
  std::vector<double> g(data.dim + 1, 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.row(i);
    const double r = sigmoid(logit(params, x)) - data.labels[i];
    for (std::size_t j = 0; j < data.dim; ++j) g[j] += r * x[j];
    g[data.dim] += r;
  }
  for (double& v : g) v /= static_cast<double>(data.size());
  return g;
}

double mean_loss(const ModelParams& params, const Dataset& data) {
  require_dims(params, data);
  if (data.empty()) throw FlError("empty dataset");
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double p = std::clamp(sigmoid(logit(params, data.row(i))), kProbClamp, 1.0 - kProbClamp);
    total += data.labels[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
  }
  return total / static_cast<double>(data.size());
}

GradientUpdate local_train_step(const ModelParams& params, const Dataset& data, const TrainingConfig& cfg,
                                std::uint64_t rng_seed, std::uint32_t client_id, std::uint32_t round) {
  cfg.validate();
  require_dims(params, data);
  if (data.empty()) throw FlError("empty dataset");

  const std::size_t d = data.dim;
  ModelParams p = params;
  Rng rng(rng_seed);
  std::vector<std::size_t> order(data.size());
  std::vector<double> g(d + 1);

  for (std::size_t epoch = 0; epoch < cfg.local_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::fill(g.begin(), g.end(), 0.0);
      for (std::size_t b = start; b < end; ++b) {
        const auto x = data.row(order[b]);
        const double r = sigmoid(logit(p, x)) - data.labels[order[b]];
        for (std::size_t j = 0; j < d; ++j) g[j] += r * x[j];
        g[d] += r;
      }
      const double scale = cfg.learning_rate / static_cast<double>(end - start);
      for (std::size_t j = 0; j < d; ++j) p.weights[j] -= scale * g[j];
      p.bias -= scale * g[d];
    }
  }

  std::vector<double> delta(d + 1);
  for (std::size_t j = 0; j < d; ++j) delta[j] = p.weights[j] - params.weights[j];
  delta[d] = p.bias - params.bias;
  return GradientUpdate::make(client_id, round, std::move(delta));
}

ModelParams apply_global_update(const ModelParams& params, std::span<const double> agg) {
  if (agg.size() != params.dim() + 1) throw FlError("aggregate dimension mismatch");
  for (double v : agg) {
    if (!std::isfinite(v)) throw FlError("aggregate contains non-finite entries");
  }
  ModelParams out = params;
  for (std::size_t j = 0; j < params.dim(); ++j) out.weights[j] += agg[j];
  out.bias += agg[params.dim()];
  return out;
}

Evaluation evaluate(const ModelParams& params, const Dataset& data) {
  require_dims(params, data);
  if (data.empty()) throw FlError("empty dataset");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int predicted = sigmoid(logit(params, data.row(i))) >= 0.5 ? 1 : 0;
    if (predicted == data.labels[i]) ++correct;
  }
  return {static_cast<double>(correct) / static_cast<double>(data.size()), mean_loss(params, data)};
}

Dataset concat(std::span<const Dataset> parts) {
  Dataset out;
  if (parts.empty()) return out;
  out.dim = parts.front().dim;
  for (const Dataset& p : parts) {
    if (p.dim != out.dim) throw FlError("cannot concatenate datasets of different dimension");
    out.features.insert(out.features.end(), p.features.begin(), p.features.end());
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
  }
  return out;
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  for (std::size_t j = 0; j < data.dim; ++j) out << 'f' << j << ',';
  out << "label\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.row(i)) out << v << ',';
    out << data.labels[i] << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FlError("dataset CSV is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header.back() != "label") throw FlError("dataset CSV header must end with 'label'");
  Dataset ds;
  ds.dim = header.size() - 1;
  for (std::size_t j = 0; j < ds.dim; ++j) {
    if (header[j] != "f" + std::to_string(j)) throw FlError("unexpected dataset CSV column '" + header[j] + "'");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        if (col < ds.dim) {
          ds.features.push_back(std::stod(cell));
        } else if (col == ds.dim) {
          ds.labels.push_back(std::stoi(cell));
        }
      } catch (const std::exception&) {
        throw FlError("bad numeric value on dataset CSV line " + std::to_string(line_no));
      }
      ++col;
    }
    if (col != ds.dim + 1) throw FlError("wrong column count on dataset CSV line " + std::to_string(line_no));
  }
  ds.validate();
  return ds;
}

}  // namespace pqfl::fl
