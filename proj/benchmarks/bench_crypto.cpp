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

#include "pqfl/kem.hpp"
#include "pqfl/sig.hpp"

namespace {

using namespace pqfl;

Seed32 seed_of(std::uint64_t x) {
  Seed32 s{};
  for (int i = 0; i < 8; ++i) s[i] = static_cast<std::uint8_t>(x >> (8 * i));
  return s;
}

kem::KemParams kem_params(std::int64_t k) { return k == 3 ? kem::rank3_kem_params() : kem::default_kem_params(); }

void BM_KemKeygen(benchmark::State& state) {
  const kem::KemParams p = kem_params(state.range(0));
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(kem::kem_keygen(p, seed_of(i++)));
}
BENCHMARK(BM_KemKeygen)->Arg(2)->Arg(3);

void BM_KemEncapsulate(benchmark::State& state) {
  const kem::KemKeyPair kp = kem::kem_keygen(kem_params(state.range(0)), seed_of(1));
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(kem::kem_encapsulate(kp.pub, seed_of(i++)));
}
BENCHMARK(BM_KemEncapsulate)->Arg(2)->Arg(3);

void BM_KemDecapsulate(benchmark::State& state) {
  const kem::KemKeyPair kp = kem::kem_keygen(kem_params(state.range(0)), seed_of(1));
  const kem::Encapsulation enc = kem::kem_encapsulate(kp.pub, seed_of(2));
  for (auto _ : state) benchmark::DoNotOptimize(kem::kem_decapsulate(kp, enc.ct));
}
BENCHMARK(BM_KemDecapsulate)->Arg(2)->Arg(3);

void BM_Sign(benchmark::State& state) {
  const sig::SigKeyPair kp = sig::sig_keygen(sig::SigParams{}, seed_of(3));
  const Bytes msg(256, 0x42);
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sig::sig_sign(kp, msg, seed_of(i++)));
}
BENCHMARK(BM_Sign);

void BM_Verify(benchmark::State& state) {
  const sig::SigKeyPair kp = sig::sig_keygen(sig::SigParams{}, seed_of(3));
  const Bytes msg(256, 0x42);
  const sig::Signature s = sig::sig_sign(kp, msg, seed_of(4));
  for (auto _ : state) benchmark::DoNotOptimize(sig::sig_verify(kp.pub, msg, s));
}
BENCHMARK(BM_Verify);

}  // namespace
