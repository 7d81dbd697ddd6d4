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

#include "pqfl/adversary.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "pqfl/quantize.hpp"
#include "pqfl/rng.hpp"

namespace pqfl::adversary {
namespace {

constexpr double kMinResidual = 1e-9;
constexpr std::string_view kMethodMlwe = "no applicable quantum attack implemented";
constexpr std::string_view kMethodPlaintext = "payload sent in the clear";

bool is_prime(std::uint64_t v) {
  if (v < 2) return false;
  if (v % 2 == 0) return v == 2;
  for (std::uint64_t d = 3; d * d <= v; d += 2) {
    if (v % d == 0) return false;
  }
  return true;
}

__extension__ typedef unsigned __int128 u128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

// e^{-1} mod m, or 0 when not invertible.
std::uint64_t mod_inverse(std::uint64_t e, std::uint64_t m) {
  std::int64_t old_r = static_cast<std::int64_t>(e % m);
  std::int64_t r = static_cast<std::int64_t>(m);
  std::int64_t old_s = 1;
  std::int64_t s = 0;
  while (r != 0) {
    const std::int64_t quotient = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - quotient * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - quotient * s);
  }
  if (old_r != 1) return 0;
  const auto mm = static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(((old_s % mm) + mm) % mm);
}

std::uint64_t next_odd_prime(std::uint64_t v) {
  v += (v % 2 == 0) ? 1 : 2;
  while (!is_prime(v)) v += 2;
  return v;
}

std::uint64_t random_prime(Rng& rng, unsigned bits) {
  const std::uint64_t lo = 1ULL << (bits - 1);
  const std::uint64_t span = lo;  // [2^(b-1), 2^b)
  for (;;) {
    std::uint64_t c = lo + rng.below(span);
    c |= 1;
    if (c >= (lo << 1)) continue;
    if (is_prime(c)) return c;
  }
}

std::optional<std::vector<double>> decrypt_rsa_payload(const RsaToyKey& key, ByteView payload,
                                                       const quant::Quantizer& quantizer) {
  std::vector<double> out;
  for (std::uint64_t c : wire::decode_rsa_blocks(payload)) {
    if (c >= key.n_modulus) return std::nullopt;
    const std::uint64_t m = rsa_toy_cipher(key, c, RsaDirection::kDecrypt);
    if (m > 0xFFFF) return std::nullopt;
    out.push_back(quantizer.dequantize(static_cast<std::int16_t>(static_cast<std::uint16_t>(m))));
  }
  return out;
}

}  // namespace

void AttackSpec::validate(std::size_t n_clients) const {
  if (kind == AttackKind::kScale && (lambda == 0.0 || !std::isfinite(lambda))) {
    throw AdversaryError("attack.lambda must be finite and nonzero");
  }
  if (kind == AttackKind::kGaussian && !(sigma >= 0.0 && std::isfinite(sigma))) {
    throw AdversaryError("attack.sigma must be finite and >= 0");
  }
  for (std::uint32_t id : attacker_ids) {
    if (id >= n_clients) throw AdversaryError("attack.attackers contains unknown client " + std::to_string(id));
  }
}

fl::GradientUpdate byzantine_transform(const fl::GradientUpdate& honest, const AttackSpec& spec,
                                       std::uint64_t rng_seed) {
  fl::GradientUpdate out = honest;
  switch (spec.kind) {
    case AttackKind::kNone:
      return out;
    case AttackKind::kSignFlip:
      for (double& v : out.delta) v = -v;
      break;
    case AttackKind::kScale:
      if (spec.lambda == 0.0) throw AdversaryError("scale attack requires lambda != 0");
      for (double& v : out.delta) v *= spec.lambda;
      break;
    case AttackKind::kGaussian: {
      Rng rng(rng_seed);
      for (double& v : out.delta) v += spec.sigma * rng.normal();
      break;
    }
    case AttackKind::kLabelFlip:
      throw AdversaryError("label_flip is a dataset transform; apply flip_labels before training");
  }
  out.norm = fl::l2_norm(out.delta);
  return out;
}

fl::Dataset flip_labels(const fl::Dataset& data) {
  fl::Dataset out = data;
  for (int& y : out.labels) y = 1 - y;
  return out;
}

std::optional<std::vector<double>> model_inversion_attack(const fl::GradientUpdate& update,
                                                          const fl::ModelParams& known_params,
                                                          const InversionScope& scope) {
  if (scope.samples != 1 || scope.local_steps != 1 || !scope.full_batch) return std::nullopt;
  if (update.delta.size() != known_params.dim() + 1 || update.delta.size() < 2) return std::nullopt;
  const double residual = update.delta.back();
  if (!std::isfinite(residual) || std::abs(residual) < kMinResidual) return std::nullopt;
  std::vector<double> x(update.delta.begin(), update.delta.end() - 1);
  for (double& v : x) v /= residual;
  return x;
}

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  if (mod == 1) return 0;
  std::uint64_t result = 1;
  base %= mod;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, mod);
    base = mul_mod(base, base, mod);
    exp >>= 1;
  }
  return result;
}

// Period finding by baby-step giant-step: O(sqrt(n)) group operations,
// which keeps 32-bit moduli in the millisecond range.
OrderFinding shor_order_find(std::uint64_t a, std::uint64_t n_modulus, const QuantumOracle& oracle) {
  if (static_cast<unsigned>(std::bit_width(n_modulus)) > oracle.max_modulus_bits) {
    throw AdversaryError("modulus exceeds the oracle's " + std::to_string(oracle.max_modulus_bits) + "-bit bound");
  }
  if (!(a > 1 && a < n_modulus)) throw AdversaryError("order finding requires 1 < a < n");
  const std::uint64_t g = std::gcd(a, n_modulus);
  if (g > 1) return SharedFactor{g};

  const auto m = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(n_modulus)))) + 1;
  std::unordered_map<std::uint64_t, std::uint64_t> baby;
  baby.reserve(static_cast<std::size_t>(m));
  std::uint64_t cur = 1;
  for (std::uint64_t j = 0; j < m; ++j) {
    if (j > 0 && cur == 1) return Order{j};
    baby.emplace(cur, j);
    cur = mul_mod(cur, a, n_modulus);
  }
  // All baby steps are distinct here, so the first collision is the order.
  const std::uint64_t giant = mod_pow(a, m, n_modulus);
  std::uint64_t g_cur = 1;
  for (std::uint64_t i = 1; i <= m + 1; ++i) {
    g_cur = mul_mod(g_cur, giant, n_modulus);
    auto it = baby.find(g_cur);
    if (it != baby.end()) return Order{i * m - it->second};
  }
  throw AdversaryError("order not found; a is not a unit mod n");
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> factor_from_order(std::uint64_t a, std::uint64_t r,
                                                                         std::uint64_t n_modulus) {
  if (r == 0 || r % 2 == 1) return std::nullopt;
  const std::uint64_t y = mod_pow(a, r / 2, n_modulus);
  if (y == n_modulus - 1) return std::nullopt;
  const std::uint64_t p = std::gcd(y + n_modulus - 1, n_modulus);
  if (p == 1 || p == n_modulus) return std::nullopt;
  const std::uint64_t q = n_modulus / p;
  return std::make_pair(std::min(p, q), std::max(p, q));
}

std::pair<std::uint64_t, std::uint64_t> shor_factor(std::uint64_t n_modulus, const QuantumOracle& oracle,
                                                    std::uint64_t rng_seed, unsigned max_attempts) {
  if (n_modulus < 4) throw AdversaryError("modulus too small to factor");
  if (n_modulus % 2 == 0) return {2, n_modulus / 2};
  Rng rng(rng_seed);
  for (unsigned attempt = 0; attempt < max_attempts; ++attempt) {
    const std::uint64_t a = 2 + rng.below(n_modulus - 3);
    const OrderFinding found = shor_order_find(a, n_modulus, oracle);
    if (const auto* sf = std::get_if<SharedFactor>(&found)) {
      const std::uint64_t p = sf->factor;
      return {std::min(p, n_modulus / p), std::max(p, n_modulus / p)};
    }
    if (auto split = factor_from_order(a, std::get<Order>(found).r, n_modulus)) return *split;
  }
  throw AdversaryError("factoring did not succeed within the attempt budget");
}

RsaToyKey rsa_toy_key_from_primes(std::uint64_t p, std::uint64_t q) {
  if (!is_prime(p) || !is_prime(q) || p == q) throw AdversaryError("RSA primes must be distinct primes");
  const std::uint64_t n = p * q;
  if (std::bit_width(n) > 32) throw AdversaryError("toy RSA modulus must be below 2^32");
  const std::uint64_t phi = (p - 1) * (q - 1);
  std::uint64_t e = 17;
  while (std::gcd(e, phi) != 1) e = next_odd_prime(e);
  if (e >= phi) throw AdversaryError("no public exponent below phi");
  return RsaToyKey{n, e, mod_inverse(e, phi), p, q};
}

RsaToyKey rsa_toy_keygen(unsigned bits, std::uint64_t rng_seed) {
  if (bits < 8 || bits > 32) throw AdversaryError("toy RSA bits must lie in [8, 32]");
  Rng rng(derive_seed(rng_seed, {0x727361ULL}));
  const unsigned p_bits = bits / 2;
  const unsigned q_bits = bits - p_bits;
  for (;;) {
    const std::uint64_t p = random_prime(rng, p_bits);
    const std::uint64_t q = random_prime(rng, q_bits);
    if (p == q) continue;
    const std::uint64_t phi = (p - 1) * (q - 1);
    std::uint64_t e = 17;
    while (std::gcd(e, phi) != 1) e = next_odd_prime(e);
    if (e >= phi) continue;
    return rsa_toy_key_from_primes(p, q);
  }
}

std::uint64_t rsa_toy_cipher(const RsaToyKey& key, std::uint64_t block, RsaDirection direction) {
  if (block >= key.n_modulus) throw AdversaryError("RSA block must be smaller than the modulus");
  return mod_pow(block, direction == RsaDirection::kEncrypt ? key.e_pub : key.d_priv, key.n_modulus);
}

DecryptionReport harvest_decrypt(std::span<const wire::RoundTranscript> transcripts, const QuantumOracle& oracle) {
  DecryptionReport report;
  std::optional<wire::SessionAnnouncement> session;
  std::optional<wire::RsaKeyAnnouncement> rsa_pub;
  std::map<std::uint64_t, std::optional<RsaToyKey>> cracked;
  std::vector<std::string> methods;
  auto note = [&methods](std::string m) {
    if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(std::move(m));
  };

  for (const wire::RoundTranscript& t : transcripts) {
    for (const wire::WireMessage& msg : t.messages) {
      if (msg.phase == wire::Phase::kSetup) {
        try {
          const wire::Announcement a = wire::decode_announcement(msg.bytes);
          if (const auto* s = std::get_if<wire::SessionAnnouncement>(&a)) session = *s;
          if (const auto* r = std::get_if<wire::RsaKeyAnnouncement>(&a)) rsa_pub = *r;
        } catch (const DecodeError&) {
        }
        continue;
      }
      if (msg.phase != wire::Phase::kSubmission) continue;
      ++report.total_messages;

      wire::SignedCipherUpdate sub;
      try {
        sub = wire::SignedCipherUpdate::from_bytes(msg.bytes);
      } catch (const DecodeError&) {
        continue;
      }
      if (!sub.kem_ciphertext.empty()) {
        note(std::string(kMethodMlwe));
        continue;
      }
      if (!session) continue;
      const quant::Quantizer quantizer(session->quant_scale);
      std::optional<std::vector<double>> plain;
      try {
        if (session->suite == wire::CryptoSuite::kPlaintext) {
          plain = quantizer.decode(sub.payload);
          note(std::string(kMethodPlaintext));
        } else if (session->suite == wire::CryptoSuite::kRsaToy && rsa_pub) {
          auto it = cracked.find(rsa_pub->modulus);
          if (it == cracked.end()) {
            std::optional<RsaToyKey> key;
            try {
              const auto [p, q] = shor_factor(rsa_pub->modulus, oracle, rsa_pub->modulus);
              const std::uint64_t phi = (p - 1) * (q - 1);
              key = RsaToyKey{rsa_pub->modulus, rsa_pub->exponent, mod_inverse(rsa_pub->exponent, phi), p, q};
            } catch (const AdversaryError&) {
            }
            it = cracked.emplace(rsa_pub->modulus, key).first;
          }
          if (it->second) {
            plain = decrypt_rsa_payload(*it->second, sub.payload, quantizer);
            note("order finding factored the " + std::to_string(std::bit_width(rsa_pub->modulus)) +
                 "-bit RSA modulus; private exponent rebuilt");
          } else {
            note("RSA modulus beyond the oracle's reach");
          }
        }
      } catch (const DecodeError&) {
        plain.reset();
      }
      if (plain) {
        ++report.recovered;
        report.recovered_plaintexts.push_back(RecoveredPayload{sub.round, sub.client_id, std::move(*plain)});
      }
    }
  }

  std::sort(report.recovered_plaintexts.begin(), report.recovered_plaintexts.end(),
            [](const RecoveredPayload& a, const RecoveredPayload& b) {
              return std::tie(a.round, a.client_id) < std::tie(b.round, b.client_id);
            });
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (i > 0) report.method += "; ";
    report.method += methods[i];
  }
  if (report.method.empty()) report.method = "no harvestable submissions";
  return report;
}

}  // namespace pqfl::adversary
