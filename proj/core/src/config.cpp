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

#include "pqfl/config.hpp"

#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "pqfl/xof.hpp"

namespace pqfl::sim {
namespace {

using nlohmann::json;

template <class E>
struct Named {
  std::string_view name;
  E value;
};

constexpr Named<wire::CryptoSuite> kSuites[] = {
    {"plaintext", wire::CryptoSuite::kPlaintext},
    {"rsa_toy", wire::CryptoSuite::kRsaToy},
    {"pqc", wire::CryptoSuite::kPqc},
};
constexpr Named<agg::AggKind> kRules[] = {
    {"mean", agg::AggKind::kMean},
    {"trimmed_mean", agg::AggKind::kTrimmedMean},
    {"krum", agg::AggKind::kKrum},
};
constexpr Named<agg::ClipMode> kClipModes[] = {
    {"none", agg::ClipMode::kNone},
    {"static", agg::ClipMode::kStatic},
    {"adaptive", agg::ClipMode::kAdaptivePercentile},
};
constexpr Named<adversary::AttackKind> kAttacks[] = {
    {"none", adversary::AttackKind::kNone},
    {"sign_flip", adversary::AttackKind::kSignFlip},
    {"scale", adversary::AttackKind::kScale},
    {"label_flip", adversary::AttackKind::kLabelFlip},
    {"gaussian", adversary::AttackKind::kGaussian},
};

template <class E, std::size_t N>
std::string_view name_of(const Named<E> (&table)[N], E value) {
  for (const auto& e : table) {
    if (e.value == value) return e.name;
  }
  return "unknown";
}

// One JSON object with a fixed key set. Any other key is rejected up front.
class Object {
 public:
  Object(const json& j, std::string path, std::initializer_list<std::string_view> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(label() + "must be an object");
    for (const auto& item : j.items()) {
      bool known = false;
      for (std::string_view a : allowed) known = known || a == item.key();
      if (!known) throw ConfigError(field(item.key()) + ": unknown key");
    }
  }

  bool has(std::string_view key) const { return j_.contains(key); }

  void require(std::string_view key) const {
    if (!has(key)) throw ConfigError(field(key) + ": missing required field");
  }

  void count(std::string_view key, std::size_t& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (v.is_number_unsigned() ||
        (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      out = v.get<std::size_t>();
      return;
    }
    throw ConfigError(field(key) + ": expected a non-negative integer");
  }

  void count(std::string_view key, unsigned& out) const {
    std::size_t wide = out;
    count(key, wide);
    if (wide > std::numeric_limits<unsigned>::max()) throw ConfigError(field(key) + ": value too large");
    out = static_cast<unsigned>(wide);
  }

  void u64(std::string_view key, std::uint64_t& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      out = v.get<std::uint64_t>();
      return;
    }
    throw ConfigError(field(key) + ": expected an unsigned 64-bit integer");
  }

  void real(std::string_view key, double& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(field(key) + ": expected a number");
    out = v.get<double>();
  }

  void boolean(std::string_view key, bool& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(field(key) + ": expected true or false");
    out = v.get<bool>();
  }

  template <class E, std::size_t N>
  void choice(std::string_view key, const Named<E> (&table)[N], E& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    std::string allowed;
    for (const auto& e : table) allowed += (allowed.empty() ? "" : ", ") + std::string(e.name);
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      for (const auto& e : table) {
        if (e.name == s) {
          out = e.value;
          return;
        }
      }
      throw ConfigError(field(key) + ": unknown value \"" + s + "\"; allowed: " + allowed);
    }
    throw ConfigError(field(key) + ": expected one of " + allowed);
  }

  const json& at(std::string_view key) const { return j_.at(key); }
  std::string field(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }

 private:
  std::string label() const { return path_.empty() ? "config " : path_ + " "; }

  const json& j_;
  std::string path_;
};

json to_json(const ScenarioConfig& c) {
  json attackers = json::array();
  for (std::uint32_t id : c.attack.attacker_ids) attackers.push_back(id);
  const std::string_view rule =
      c.agg_rule.kind == agg::AggKind::kSum ? std::string_view("sum") : name_of(kRules, c.agg_rule.kind);
  return json{
      {"n_clients", c.n_clients},
      {"rounds", c.rounds},
      {"crypto_suite", suite_key(c.suite)},
      {"seed", c.seed},
      {"agg_rule", {{"kind", rule}, {"trim_fraction", c.agg_rule.trim_fraction}, {"krum_f", c.agg_rule.krum_f}}},
      {"clip",
       {{"mode", name_of(kClipModes, c.clip.mode)},
        {"threshold", c.clip.threshold},
        {"percentile", c.clip.percentile},
        {"momentum_beta", c.clip.momentum_beta}}},
      {"dp", {{"enabled", c.dp.enabled}, {"epsilon", c.dp.epsilon}, {"delta", c.dp.delta}, {"clip", c.dp.clip_c}}},
      {"attack",
       {{"kind", name_of(kAttacks, c.attack.kind)},
        {"lambda", c.attack.lambda},
        {"sigma", c.attack.sigma},
        {"attackers", attackers}}},
      {"data",
       {{"samples_per_client", c.data.samples_per_client},
        {"dim", c.data.dim},
        {"separation", c.data.separation},
        {"test_fraction", c.data.test_fraction}}},
      {"training",
       {{"learning_rate", c.training.learning_rate},
        {"local_epochs", c.training.local_epochs},
        {"batch_size", c.training.batch_size}}},
      {"quant_scale", c.quant_scale},
      {"kem", {{"k", c.kem.k}, {"eta1", c.kem.eta1}, {"eta2", c.kem.eta2}, {"du", c.kem.du}, {"dv", c.kem.dv}}},
      {"rsa_bits", c.rsa_bits},
  };
}

}  // namespace

std::string_view suite_key(wire::CryptoSuite suite) { return name_of(kSuites, suite); }

ScenarioConfig parse_scenario_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  ScenarioConfig c;
  const Object root(doc, "",
                    {"n_clients", "rounds", "crypto_suite", "seed", "agg_rule", "clip", "dp", "attack", "data",
                     "training", "quant_scale", "kem", "rsa_bits"});
  root.require("n_clients");
  root.require("rounds");
  root.require("crypto_suite");
  root.count("n_clients", c.n_clients);
  root.count("rounds", c.rounds);
  root.choice("crypto_suite", kSuites, c.suite);
  root.u64("seed", c.seed);
  root.real("quant_scale", c.quant_scale);
  root.count("rsa_bits", c.rsa_bits);

  if (root.has("agg_rule")) {
    const Object o(root.at("agg_rule"), "agg_rule", {"kind", "trim_fraction", "krum_f"});
    o.choice("kind", kRules, c.agg_rule.kind);
    o.real("trim_fraction", c.agg_rule.trim_fraction);
    o.count("krum_f", c.agg_rule.krum_f);
  }
  if (root.has("clip")) {
    const Object o(root.at("clip"), "clip", {"mode", "threshold", "percentile", "momentum_beta"});
    o.choice("mode", kClipModes, c.clip.mode);
    o.real("threshold", c.clip.threshold);
    o.real("percentile", c.clip.percentile);
    o.real("momentum_beta", c.clip.momentum_beta);
  }
  if (root.has("dp")) {
    const Object o(root.at("dp"), "dp", {"enabled", "epsilon", "delta", "clip"});
    o.boolean("enabled", c.dp.enabled);
    o.real("epsilon", c.dp.epsilon);
    o.real("delta", c.dp.delta);
    o.real("clip", c.dp.clip_c);
  }
  if (root.has("attack")) {
    const Object o(root.at("attack"), "attack", {"kind", "lambda", "sigma", "attackers"});
    o.choice("kind", kAttacks, c.attack.kind);
    o.real("lambda", c.attack.lambda);
    o.real("sigma", c.attack.sigma);
    if (o.has("attackers")) {
      const json& ids = o.at("attackers");
      if (!ids.is_array()) throw ConfigError("attack.attackers: expected an array of client ids");
      for (const json& id : ids) {
        if (!id.is_number_unsigned() && !(id.is_number_integer() && id.get<std::int64_t>() >= 0)) {
          throw ConfigError("attack.attackers: expected non-negative integer client ids");
        }
        if (id.get<std::uint64_t>() >= wire::kAggregatorId) {
          throw ConfigError("attack.attackers: client id out of range");
        }
        c.attack.attacker_ids.insert(id.get<std::uint32_t>());
      }
    }
  }
  if (root.has("data")) {
    const Object o(root.at("data"), "data", {"samples_per_client", "dim", "separation", "test_fraction"});
    o.count("samples_per_client", c.data.samples_per_client);
    o.count("dim", c.data.dim);
    o.real("separation", c.data.separation);
    o.real("test_fraction", c.data.test_fraction);
  }
  if (root.has("training")) {
    const Object o(root.at("training"), "training", {"learning_rate", "local_epochs", "batch_size"});
    o.real("learning_rate", c.training.learning_rate);
    o.count("local_epochs", c.training.local_epochs);
    o.count("batch_size", c.training.batch_size);
  }
  if (root.has("kem")) {
    const Object o(root.at("kem"), "kem", {"k", "eta1", "eta2", "du", "dv"});
    o.count("k", c.kem.k);
    o.count("eta1", c.kem.eta1);
    o.count("eta2", c.kem.eta2);
    o.count("du", c.kem.du);
    o.count("dv", c.kem.dv);
  }

  c.validate();
  return c;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario_config(text.str());
}

std::string canonical_config_json(const ScenarioConfig& config) { return to_json(config).dump(); }

Seed32 config_hash(const ScenarioConfig& config) {
  const std::string text = canonical_config_json(config);
  return sha3_256(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace pqfl::sim
