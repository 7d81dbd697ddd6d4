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

#include <gtest/gtest.h>

#include <bit>
#include <numeric>
#include <random>

#include "pqfl/quantize.hpp"
#include "pqfl/robust_agg.hpp"
#include "test_support.hpp"

namespace pqfl::adversary {
namespace {

using testing::seed_from;

// Order by brute force.
std::uint64_t naive_order(std::uint64_t a, std::uint64_t n) {
  std::uint64_t x = a % n;
  for (std::uint64_t r = 1;; ++r) {
    if (x == 1) return r;
    x = x * a % n;
  }
}

TEST(Byzantine, TransformsMatchDefinitions) {
  const auto honest = fl::GradientUpdate::make(3, 1, {1.0, -2.0, 0.5});
  AttackSpec spec;
  spec.kind = AttackKind::kSignFlip;
  EXPECT_EQ(byzantine_transform(honest, spec, 1).delta, (std::vector<double>{-1.0, 2.0, -0.5}));
  spec.kind = AttackKind::kScale;
  spec.lambda = -4.0;
  EXPECT_EQ(byzantine_transform(honest, spec, 1).delta, (std::vector<double>{-4.0, 8.0, -2.0}));
  spec.kind = AttackKind::kNone;
  EXPECT_EQ(byzantine_transform(honest, spec, 1).delta, honest.delta);
  spec.kind = AttackKind::kGaussian;
  spec.sigma = 0.1;
  const auto g = byzantine_transform(honest, spec, 5);
  EXPECT_EQ(g.delta, byzantine_transform(honest, spec, 5).delta);
  EXPECT_NE(g.delta, honest.delta);
  EXPECT_TRUE(g.consistent());
  EXPECT_EQ(g.client_id, 3u);
  spec.kind = AttackKind::kLabelFlip;
  EXPECT_THROW(byzantine_transform(honest, spec, 1), AdversaryError);
}

TEST(Byzantine, SpecValidationAndLabelFlip) {
  AttackSpec spec{AttackKind::kSignFlip, 1.0, 1.0, {0, 9}};
  EXPECT_NO_THROW(spec.validate(10));
  EXPECT_THROW(spec.validate(9), AdversaryError);
  EXPECT_TRUE(spec.is_attacker(9));
  EXPECT_FALSE(spec.is_attacker(1));

  fl::Dataset d{1, {0.1, 0.2, 0.3}, {0, 1, 1}};
  EXPECT_EQ(flip_labels(d).labels, (std::vector<int>{1, 0, 0}));
  EXPECT_EQ(flip_labels(d).features, d.features);
}

TEST(ModelInversion, RecoversSingleSampleExactly) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 100; ++t) {
    fl::Dataset d{6, {}, {static_cast<int>(gen() % 2)}};
    for (int j = 0; j < 6; ++j) d.features.push_back(nd(gen));
    fl::ModelParams p = fl::ModelParams::zeros(6);
    for (double& w : p.weights) w = 0.1 * nd(gen);
    fl::TrainingConfig cfg;
    cfg.batch_size = 1;
    const auto u = fl::local_train_step(p, d, cfg, t);
    const auto x = model_inversion_attack(u, p);
    ASSERT_TRUE(x.has_value());
    ASSERT_LE(testing::l2_distance(*x, d.features), 1e-9);
  }
}

TEST(ModelInversion, DeclinesOutsideItsScope) {
  const fl::ModelParams p = fl::ModelParams::zeros(2);
  const auto u = fl::GradientUpdate::make(0, 0, {0.1, 0.2, 0.05});
  EXPECT_TRUE(model_inversion_attack(u, p).has_value());
  EXPECT_FALSE(model_inversion_attack(u, p, InversionScope{2, 1, true}).has_value());
  EXPECT_FALSE(model_inversion_attack(u, p, InversionScope{1, 3, true}).has_value());
  EXPECT_FALSE(model_inversion_attack(u, fl::ModelParams::zeros(3)).has_value());
  EXPECT_FALSE(model_inversion_attack(fl::GradientUpdate::make(0, 0, {0.1, 0.2, 0.0}), p).has_value());
}

TEST(OrderFinding, MatchesBruteForce) {
  const QuantumOracle oracle;
  for (std::uint64_t n : {15ULL, 21ULL, 91ULL, 3233ULL, 10403ULL}) {
    for (std::uint64_t a = 2; a < std::min<std::uint64_t>(n, 60); ++a) {
      const OrderFinding f = shor_order_find(a, n, oracle);
      if (std::gcd(a, n) != 1) {
        ASSERT_TRUE(std::holds_alternative<SharedFactor>(f));
        ASSERT_EQ(std::get<SharedFactor>(f).factor, std::gcd(a, n));
      } else {
        ASSERT_TRUE(std::holds_alternative<Order>(f));
        ASSERT_EQ(std::get<Order>(f).r, naive_order(a, n)) << a << " mod " << n;
      }
    }
  }
  EXPECT_THROW(shor_order_find(2, (1ULL << 33) + 1, oracle), AdversaryError);
}

TEST(OrderFinding, PostProcessing) {
  // 7 has order 4 mod 15, 7^2 = 4: gcd(3, 15) = 3, gcd(5, 15) = 5.
  const auto f = factor_from_order(7, 4, 15);
  ASSERT_TRUE(f.has_value());
  EXPECT_EQ(*f, (std::pair<std::uint64_t, std::uint64_t>{3, 5}));
  EXPECT_FALSE(factor_from_order(4, 3, 15).has_value());   // odd order retry
  EXPECT_FALSE(factor_from_order(14, 2, 15).has_value());  // a^(r/2) = -1 retry
}

TEST(ShorFactor, SplitsToyModuli) {
  const QuantumOracle oracle;
  for (unsigned bits : {18u, 24u, 32u}) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const RsaToyKey k = rsa_toy_keygen(bits, s);
      const auto [p, q] = shor_factor(k.n_modulus, oracle, s);
      ASSERT_EQ(p * q, k.n_modulus);
      ASSERT_EQ(std::min(k.p, k.q_factor), p);
    }
  }
}

TEST(RsaToy, TextbookKeyAndRoundtrip) {
  const RsaToyKey k = rsa_toy_key_from_primes(61, 53);
  EXPECT_EQ(k.n_modulus, 3233u);
  EXPECT_EQ(k.e_pub, 17u);
  EXPECT_EQ(k.d_priv, 2753u);
  EXPECT_EQ(rsa_toy_cipher(k, 65, RsaDirection::kEncrypt), 2790u);
  EXPECT_EQ(rsa_toy_cipher(k, 2790, RsaDirection::kDecrypt), 65u);
  EXPECT_THROW(rsa_toy_cipher(k, 3233, RsaDirection::kEncrypt), AdversaryError);

  const RsaToyKey g = rsa_toy_keygen(32, 7);
  EXPECT_EQ(g, rsa_toy_keygen(32, 7));
  EXPECT_GE(std::bit_width(g.n_modulus), 31);
  EXPECT_LE(std::bit_width(g.n_modulus), 32);
  for (std::uint64_t m : {0ULL, 1ULL, 65535ULL, 1234ULL}) {
    EXPECT_EQ(rsa_toy_cipher(g, rsa_toy_cipher(g, m, RsaDirection::kEncrypt), RsaDirection::kDecrypt), m);
  }
  EXPECT_EQ(mod_pow(3, 200, 1000003), mod_pow(9, 100, 1000003));
  EXPECT_THROW(rsa_toy_keygen(40, 1), AdversaryError);
}

wire::RoundTranscript setup_round(wire::CryptoSuite suite, const std::optional<RsaToyKey>& key) {
  wire::RoundTranscript t;
  t.post(wire::kAggregatorId, wire::Phase::kSetup,
         wire::encode_announcement(wire::SessionAnnouncement{suite, 1024.0, 3, 2}));
  if (key) {
    t.post(wire::kAggregatorId, wire::Phase::kSetup,
           wire::encode_announcement(wire::RsaKeyAnnouncement{key->n_modulus, key->e_pub}));
  }
  return t;
}

TEST(Harvest, BreaksToyRsaSubmissions) {
  const RsaToyKey key = rsa_toy_keygen(30, 3);
  const quant::Quantizer q;
  std::vector<wire::RoundTranscript> ts{setup_round(wire::CryptoSuite::kRsaToy, key)};
  wire::RoundTranscript r1;
  r1.round = 1;
  const std::vector<std::vector<double>> deltas{{0.25, -0.5, 1.0}, {-0.125, 0.0, 3.0}};
  for (std::uint32_t c : {1u, 0u}) {
    wire::SignedCipherUpdate s;
    s.round = 1;
    s.client_id = c;
    std::vector<std::uint64_t> blocks;
    for (std::int16_t v : q.quantize(deltas[c])) {
      blocks.push_back(rsa_toy_cipher(key, static_cast<std::uint16_t>(v), RsaDirection::kEncrypt));
    }
    s.payload = wire::encode_rsa_blocks(blocks);
    r1.post(c, wire::Phase::kSubmission, s.to_bytes());
  }
  ts.push_back(r1);

  const DecryptionReport rep = harvest_decrypt(ts, QuantumOracle{});
  EXPECT_EQ(rep.total_messages, 2u);
  EXPECT_EQ(rep.recovered, 2u);
  ASSERT_EQ(rep.recovered_plaintexts.size(), 2u);
  EXPECT_EQ(rep.recovered_plaintexts[0].client_id, 0u);
  EXPECT_EQ(rep.recovered_plaintexts[0].delta, deltas[0]);
  EXPECT_EQ(rep.recovered_plaintexts[1].delta, deltas[1]);
  const std::string bits = std::to_string(std::bit_width(key.n_modulus)) + "-bit RSA modulus";
  EXPECT_NE(rep.method.find(bits), std::string::npos);

  // A weaker oracle cannot reach the modulus.
  const DecryptionReport weak = harvest_decrypt(ts, QuantumOracle{20});
  EXPECT_EQ(weak.recovered, 0u);
  EXPECT_EQ(weak.total_messages, 2u);
}

TEST(Harvest, RecoversNothingFromKemSubmissions) {
  const kem::KemKeyPair kk = kem::kem_keygen(kem::default_kem_params(), seed_from(1));
  const sig::SigKeyPair sk = sig::sig_keygen(sig::SigParams{}, seed_from(2));
  std::vector<wire::RoundTranscript> ts{setup_round(wire::CryptoSuite::kPqc, std::nullopt)};
  ts[0].post(wire::kAggregatorId, wire::Phase::kSetup, wire::encode_announcement(wire::KemKeyAnnouncement{kk.pub}));
  wire::RoundTranscript r1;
  r1.round = 1;
  const auto u = fl::GradientUpdate::make(0, 1, {0.1, 0.2, 0.3});
  r1.post(0, wire::Phase::kSubmission,
          agg::seal_update(u, kk.pub, sk, seed_from(3), seed_from(4), quant::Quantizer()).to_bytes());
  ts.push_back(r1);
  const DecryptionReport rep = harvest_decrypt(ts, QuantumOracle{});
  EXPECT_EQ(rep.total_messages, 1u);
  EXPECT_EQ(rep.recovered, 0u);
  EXPECT_EQ(rep.method, "no applicable quantum attack implemented");
}

TEST(Harvest, PlaintextAndEmpty) {
  std::vector<wire::RoundTranscript> ts{setup_round(wire::CryptoSuite::kPlaintext, std::nullopt)};
  EXPECT_EQ(harvest_decrypt(ts, QuantumOracle{}).method, "no harvestable submissions");
  wire::SignedCipherUpdate s;
  s.round = 1;
  s.payload = quant::Quantizer().encode(std::vector<double>{0.5, 0.25, -1.0});
  wire::RoundTranscript r1;
  r1.round = 1;
  r1.post(0, wire::Phase::kSubmission, s.to_bytes());
  ts.push_back(r1);
  const DecryptionReport rep = harvest_decrypt(ts, QuantumOracle{});
  EXPECT_EQ(rep.recovered, 1u);
  EXPECT_EQ(rep.recovered_plaintexts[0].delta, (std::vector<double>{0.5, 0.25, -1.0}));
  EXPECT_EQ(rep.method, "payload sent in the clear");
}

}  // namespace
}  // namespace pqfl::adversary
