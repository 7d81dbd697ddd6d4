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

// Adversaries against the federation:
//  - Byzantine clients that corrupt their own updates;
//  - model inversion of single-sample logistic-regression updates;
//  - "harvest now, decrypt later" against the toy-RSA baseline, using a
//    classical order finder as a desk-scale stand-in for Shor's
//    period-finding subroutine (moduli capped at 32 bits).

#ifndef PQFL_ADVERSARY_HPP_
#define PQFL_ADVERSARY_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pqfl/fl.hpp"
#include "pqfl/wire.hpp"

namespace pqfl::adversary {

class AdversaryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class AttackKind { kNone, kSignFlip, kScale, kLabelFlip, kGaussian };

struct AttackSpec {
  AttackKind kind = AttackKind::kNone;
  double lambda = 1.0;  // kScale
  double sigma = 1.0;   // kGaussian
  std::set<std::uint32_t> attacker_ids;

  bool is_attacker(std::uint32_t client_id) const { return kind != AttackKind::kNone && attacker_ids.contains(client_id); }
  void validate(std::size_t n_clients) const;

  friend bool operator==(const AttackSpec&, const AttackSpec&) = default;
};

// sign_flip: -delta; scale: lambda * delta; gaussian: delta + N(0, sigma^2);
// none: unchanged. label_flip acts on data (see flip_labels) and is rejected.
fl::GradientUpdate byzantine_transform(const fl::GradientUpdate& honest, const AttackSpec& spec,
                                       std::uint64_t rng_seed);

// y -> 1 - y
fl::Dataset flip_labels(const fl::Dataset& data);

// Training configuration the inversion attack assumes.
struct InversionScope {
  std::size_t samples = 1;
  std::size_t local_steps = 1;
  bool full_batch = true;
};

// For one sample and one full-batch step the update is -lr * (r*x || r) with
// r = sigmoid(w.x + b) - y, so x = delta_w / delta_b. Returns nullopt when the
// attack does not apply.
std::optional<std::vector<double>> model_inversion_attack(const fl::GradientUpdate& update,
                                                          const fl::ModelParams& known_params,
                                                          const InversionScope& scope = {});

struct QuantumOracle {
  unsigned max_modulus_bits = 32;
};

struct Order {
  std::uint64_t r;
};
struct SharedFactor {
  std::uint64_t factor;
};
using OrderFinding = std::variant<Order, SharedFactor>;

// Multiplicative order of a mod n, or gcd(a, n) when it is nontrivial.
OrderFinding shor_order_find(std::uint64_t a, std::uint64_t n_modulus, const QuantumOracle& oracle);

// Shor post-processing. nullopt is the retry signal (r odd or
// a^(r/2) = -1 mod n). Returned factors are ordered p <= q.
std::optional<std::pair<std::uint64_t, std::uint64_t>> factor_from_order(std::uint64_t a, std::uint64_t r,
                                                                         std::uint64_t n_modulus);

// Full loop: random bases until a split is found.
std::pair<std::uint64_t, std::uint64_t> shor_factor(std::uint64_t n_modulus, const QuantumOracle& oracle,
                                                    std::uint64_t rng_seed, unsigned max_attempts = 256);

struct RsaToyKey {
  std::uint64_t n_modulus = 0;
  std::uint64_t e_pub = 0;
  std::uint64_t d_priv = 0;
  std::uint64_t p = 0;
  std::uint64_t q_factor = 0;

  friend bool operator==(const RsaToyKey&, const RsaToyKey&) = default;
};

RsaToyKey rsa_toy_keygen(unsigned bits, std::uint64_t rng_seed);
// Fixed primes; e starts at 17 and moves to the next odd prime until it is
// coprime with phi.
RsaToyKey rsa_toy_key_from_primes(std::uint64_t p, std::uint64_t q);

enum class RsaDirection { kEncrypt, kDecrypt };
std::uint64_t rsa_toy_cipher(const RsaToyKey& key, std::uint64_t block, RsaDirection direction);

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t mod);

struct RecoveredPayload {
  std::uint32_t round = 0;
  std::uint32_t client_id = 0;
  std::vector<double> delta;
};

struct DecryptionReport {
  std::size_t total_messages = 0;
  std::size_t recovered = 0;
  std::vector<RecoveredPayload> recovered_plaintexts;  // sorted by (round, client)
  std::string method;
};

// Replays harvested transcripts. Setup records tell the eavesdropper which
// suite was in use and carry the public keys; submission records are then
// attacked one by one.
DecryptionReport harvest_decrypt(std::span<const wire::RoundTranscript> transcripts, const QuantumOracle& oracle);

}  // namespace pqfl::adversary

#endif  // PQFL_ADVERSARY_HPP_
