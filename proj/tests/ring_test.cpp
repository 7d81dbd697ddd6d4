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

#include "pqfl/ring.hpp"

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <random>

#include "test_support.hpp"

namespace pqfl::ring {
namespace {

using testing::random_poly;
using testing::schoolbook_negacyclic;
using testing::seed_from;

Poly toy(std::vector<std::uint32_t> c) { return Poly(kToyRing, std::move(c)); }

TEST(RingParams, AcceptsDefaultsAndRejectsBadModuli) {
  EXPECT_NO_THROW(kKemRing.validate());
  EXPECT_NO_THROW(kSigRing.validate());
  EXPECT_NO_THROW(kToyRing.validate());
  EXPECT_THROW((RingParams{6, 13}.validate()), RingError);
  EXPECT_THROW((RingParams{4, 15}.validate()), RingError);  // composite
  EXPECT_THROW((RingParams{4, 19}.validate()), RingError);  // 19 - 1 not divisible by 4
}

TEST(Poly, ConstructorEnforcesRangeAndLength) {
  EXPECT_THROW(toy({1, 2, 3}), RingError);
  EXPECT_THROW(toy({1, 2, 3, 17}), RingError);
}

TEST(PolyAdd, WrapsModQ) {
  EXPECT_EQ(poly_add(toy({1, 2, 3, 4}), toy({16, 16, 0, 0})), toy({0, 1, 3, 4}));
}

TEST(PolyAdd, ZeroIdentityAndNegation) {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 50; ++t) {
    const Poly a = random_poly(kKemRing, gen);
    EXPECT_EQ(poly_add(a, Poly(kKemRing)), a);
    std::vector<std::uint32_t> neg(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) neg[i] = (kKemRing.q - a[i]) % kKemRing.q;
    EXPECT_TRUE(poly_add(a, Poly(kKemRing, neg)).is_zero());
  }
}

TEST(PolyAdd, MismatchedParamsThrow) {
  EXPECT_THROW(poly_add(Poly(kKemRing), Poly(kSigRing)), RingError);
  EXPECT_THROW(poly_mul_negacyclic(Poly(kKemRing), Poly(kSigRing)), RingError);
}

TEST(PolyMul, XCubedTimesXIsMinusOne) {
  EXPECT_EQ(poly_mul_negacyclic(toy({0, 0, 0, 1}), toy({0, 1, 0, 0})), toy({16, 0, 0, 0}));
}

TEST(PolyMul, OneIsIdentity) {
  std::mt19937_64 gen(2);
  Poly one(kKemRing);
  one.set(0, 1);
  for (int t = 0; t < 20; ++t) {
    const Poly a = random_poly(kKemRing, gen);
    EXPECT_EQ(poly_mul_negacyclic(a, one), a);
  }
}

class NttOracle : public ::testing::TestWithParam<RingParams> {};

TEST_P(NttOracle, MatchesSchoolbook) {
  std::mt19937_64 gen(GetParam().q);
  for (int t = 0; t < 100; ++t) {
    const Poly a = random_poly(GetParam(), gen);
    const Poly b = random_poly(GetParam(), gen);
    const Poly expected = schoolbook_negacyclic(a, b);
    ASSERT_EQ(poly_mul_negacyclic(a, b), expected);
    ASSERT_EQ(ntt_inverse(ntt_pointwise(ntt_forward(a), ntt_forward(b))), expected);
  }
}

TEST_P(NttOracle, RoundtripsBothWays) {
  std::mt19937_64 gen(GetParam().n);
  for (int t = 0; t < 100; ++t) {
    const Poly a = random_poly(GetParam(), gen);
    ASSERT_EQ(ntt_inverse(ntt_forward(a)), a);
    const Poly raw = random_poly(GetParam(), gen);
    const NttPoly hat(GetParam(), std::vector<std::uint32_t>(raw.coeffs().begin(), raw.coeffs().end()));
    ASSERT_EQ(ntt_forward(ntt_inverse(hat)), hat);
  }
}

TEST_P(NttOracle, ZeroAndLinearity) {
  EXPECT_TRUE(ntt_forward(Poly(GetParam())).is_zero());
  EXPECT_TRUE(ntt_inverse(NttPoly(GetParam())).is_zero());
  std::mt19937_64 gen(7);
  for (int t = 0; t < 20; ++t) {
    const Poly a = random_poly(GetParam(), gen);
    const Poly b = random_poly(GetParam(), gen);
    EXPECT_EQ(ntt_inverse(ntt_add(ntt_forward(a), ntt_forward(b))), poly_add(a, b));
  }
}

INSTANTIATE_TEST_SUITE_P(Rings, NttOracle, ::testing::Values(kKemRing, kSigRing, kToyRing, RingParams{64, 257}),
                         [](const auto& info) {
                           return "n" + std::to_string(info.param.n) + "_q" + std::to_string(info.param.q);
                         });

TEST(PolyMul, RingAxioms) {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 20; ++t) {
    const Poly a = random_poly(kKemRing, gen);
    const Poly b = random_poly(kKemRing, gen);
    const Poly c = random_poly(kKemRing, gen);
    EXPECT_EQ(poly_mul_negacyclic(poly_mul_negacyclic(a, b), c), poly_mul_negacyclic(a, poly_mul_negacyclic(b, c)));
    EXPECT_EQ(poly_mul_negacyclic(a, poly_add(b, c)),
              poly_add(poly_mul_negacyclic(a, b), poly_mul_negacyclic(a, c)));
    EXPECT_EQ(poly_mul_negacyclic(a, b), poly_mul_negacyclic(b, a));
  }
}

TEST(SampleUniform, DeterministicAndInRange) {
  const Seed32 seed = seed_from(11);
  const Poly a = sample_uniform(kKemRing, seed, 5);
  EXPECT_EQ(a, sample_uniform(kKemRing, seed, 5));
  EXPECT_NE(a, sample_uniform(kKemRing, seed, 6));
  const Poly wide = sample_uniform(kSigRing, seed, 1);
  for (std::uint32_t c : wide.coeffs()) EXPECT_LT(c, kSigRing.q);
}

TEST(SampleUniform, ChiSquareUniformity) {
  const std::uint32_t q = kKemRing.q;
  std::vector<std::uint64_t> counts(q, 0);
  std::size_t total = 0;
  const Seed32 seed = seed_from(12);
  for (std::uint16_t nonce = 0; total < 100000; ++nonce) {
    const Poly a = sample_uniform(kKemRing, seed, nonce);
    for (std::uint32_t c : a.coeffs()) {
      ++counts[c];
      ++total;
    }
  }
  const double expected = static_cast<double>(total) / q;
  double stat = 0.0;
  for (std::uint64_t c : counts) stat += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(q - 1);
  const double critical = boost::math::quantile(boost::math::complement(dist, 0.001));
  EXPECT_LT(stat, critical);
}

TEST(SampleCbd, SupportMeanAndDeterminism) {
  for (unsigned eta : {2u, 3u}) {
    const Seed32 seed = seed_from(20 + eta);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::uint16_t nonce = 0; count < 100000; ++nonce) {
      const Poly e = sample_cbd(kKemRing, seed, nonce, eta);
      for (std::uint32_t c : e.coeffs()) {
        const std::int64_t v = centered(c, kKemRing.q);
        ASSERT_LE(std::abs(v), static_cast<std::int64_t>(eta));
        sum += static_cast<double>(v);
        ++count;
      }
    }
    const double sd_of_mean = std::sqrt(eta / 2.0 / static_cast<double>(count));
    EXPECT_LT(std::abs(sum / static_cast<double>(count)), 3.0 * sd_of_mean) << "eta " << eta;
    EXPECT_EQ(sample_cbd(kKemRing, seed, 9, eta), sample_cbd(kKemRing, seed, 9, eta));
  }
  EXPECT_THROW(sample_cbd(kKemRing, seed_from(1), 0, 4), RingError);
}

TEST(PolySerialization, RoundtripsAtBothWidths) {
  std::mt19937_64 gen(4);
  EXPECT_EQ(coeff_width_bytes(kKemRing), 2u);
  EXPECT_EQ(coeff_width_bytes(kSigRing), 4u);
  for (RingParams p : {kKemRing, kSigRing}) {
    const Poly a = random_poly(p, gen);
    const Bytes b = poly_to_bytes(a);
    EXPECT_EQ(b.size(), p.n * coeff_width_bytes(p));
    EXPECT_EQ(poly_from_bytes(p, b), a);
  }
  Bytes bad(2 * kKemRing.n, 0xFF);
  EXPECT_THROW(poly_from_bytes(kKemRing, bad), DecodeError);
}

TEST(InfNorm, UsesCenteredRepresentatives) {
  EXPECT_EQ(inf_norm(toy({0, 16, 2, 0})), 2u);
  EXPECT_EQ(inf_norm(toy({8, 0, 0, 9})), 8u);
}

}  // namespace
}  // namespace pqfl::ring
