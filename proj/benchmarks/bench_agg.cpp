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

#include <benchmark/benchmark.h>

#include <random>

#include "pqfl/robust_agg.hpp"

namespace {

using namespace pqfl;

std::vector<agg::GradientUpdate> updates(std::size_t n, std::size_t d) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> dist(0.0, 0.1);
  std::vector<agg::GradientUpdate> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(d);
    for (double& x : v) x = dist(gen);
    out.push_back(agg::GradientUpdate::make(static_cast<std::uint32_t>(i), 1, std::move(v)));
  }
  return out;
}

void BM_Aggregate(benchmark::State& state, agg::AggRule rule) {
  const auto ups = updates(static_cast<std::size_t>(state.range(0)), 129);
  const agg::ClipPolicy clip = agg::ClipPolicy::adaptive(95);
  for (auto _ : state) benchmark::DoNotOptimize(agg::aggregate_plain(ups, rule, clip));
}
BENCHMARK_CAPTURE(BM_Aggregate, mean, agg::AggRule::mean())->Arg(10)->Arg(100);
BENCHMARK_CAPTURE(BM_Aggregate, trimmed_mean, agg::AggRule::trimmed_mean(0.2))->Arg(10)->Arg(100);
BENCHMARK_CAPTURE(BM_Aggregate, krum, agg::AggRule::krum(2))->Arg(10)->Arg(100);

void BM_VerifiedSecureAggregate(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Seed32 seed{};
  const kem::KemKeyPair kem_keys = kem::kem_keygen(kem::default_kem_params(), seed);
  agg::VerifyKeyMap verify;
  std::vector<wire::SignedCipherUpdate> subs;
  const auto ups = updates(n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    seed[1] = static_cast<std::uint8_t>(i);
    const sig::SigKeyPair sk = sig::sig_keygen(sig::SigParams{}, seed);
    verify.emplace(static_cast<std::uint32_t>(i), sk.pub);
    subs.push_back(agg::seal_update(ups[i], kem_keys.pub, sk, seed, seed, quant::Quantizer()));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(agg::verified_secure_aggregate(subs, verify, kem_keys, agg::AggRule::mean(),
                                                            agg::ClipPolicy::none()));
  }
}
BENCHMARK(BM_VerifiedSecureAggregate)->Arg(10);

}  // namespace
