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

#include "pqfl/ring.hpp"

namespace {

using namespace pqfl;

ring::Poly uniform(ring::RingParams p, std::uint16_t nonce) {
  Seed32 seed{};
  seed[0] = 1;
  return ring::sample_uniform(p, seed, nonce);
}

void BM_NttForward(benchmark::State& state, ring::RingParams p) {
  const ring::Poly a = uniform(p, 0);
  for (auto _ : state) benchmark::DoNotOptimize(ring::ntt_forward(a));
}
BENCHMARK_CAPTURE(BM_NttForward, kem_ring, ring::kKemRing);
BENCHMARK_CAPTURE(BM_NttForward, sig_ring, ring::kSigRing);

void BM_PolyMul(benchmark::State& state, ring::RingParams p) {
  const ring::Poly a = uniform(p, 0);
  const ring::Poly b = uniform(p, 1);
  for (auto _ : state) benchmark::DoNotOptimize(ring::poly_mul_negacyclic(a, b));
}
BENCHMARK_CAPTURE(BM_PolyMul, kem_ring, ring::kKemRing);
BENCHMARK_CAPTURE(BM_PolyMul, sig_ring, ring::kSigRing);

void BM_SampleUniform(benchmark::State& state) {
  Seed32 seed{};
  std::uint16_t nonce = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ring::sample_uniform(ring::kKemRing, seed, nonce++));
}
BENCHMARK(BM_SampleUniform);

}  // namespace

BENCHMARK_MAIN();
