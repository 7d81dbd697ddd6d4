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

// Scenario configs as JSON documents. Parsing is strict: unknown keys,
// wrong types and out-of-range values are errors that name the field.
//
//   {
//     "n_clients": 10, "rounds": 5, "crypto_suite": "pqc",       (required)
//     "seed": 7,
//     "agg_rule": {"kind": "mean" | "trimmed_mean" | "krum",
//                  "trim_fraction": 0.2, "krum_f": 2},
//     "clip": {"mode": "none" | "static" | "adaptive", "threshold": 1.0,
//              "percentile": 95, "momentum_beta": 0.0},
//     "dp": {"enabled": false, "epsilon": 1.0, "delta": 1e-5, "clip": 1.0},
//     "attack": {"kind": "none" | "sign_flip" | "scale" | "label_flip" | "gaussian",
//                "lambda": 1.0, "sigma": 1.0, "attackers": [0, 1]},
//     "data": {"samples_per_client": 200, "dim": 8, "separation": 4.0,
//              "test_fraction": 0.2},
//     "training": {"learning_rate": 0.1, "local_epochs": 1, "batch_size": 32},
//     "quant_scale": 1024,
//     "kem": {"k": 2, "eta1": 3, "eta2": 2, "du": 10, "dv": 4},
//     "rsa_bits": 32
//   }

#ifndef PQFL_CONFIG_HPP_
#define PQFL_CONFIG_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include "pqfl/bytes.hpp"
#include "pqfl/simnet.hpp"

namespace pqfl::sim {

// Throws ConfigError.
ScenarioConfig parse_scenario_config(std::string_view text);
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

// Every field spelled out, keys sorted; parse(canonical(c)) == c.
std::string canonical_config_json(const ScenarioConfig& config);

// SHA3-256 of the canonical form; stamped into transcript files.
Seed32 config_hash(const ScenarioConfig& config);

std::string_view suite_key(wire::CryptoSuite suite);

}  // namespace pqfl::sim

#endif  // PQFL_CONFIG_HPP_
