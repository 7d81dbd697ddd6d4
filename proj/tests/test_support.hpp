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

// Independent reference implementations used as test oracles. Nothing here
// calls into the code under test except for plain data types.

#ifndef PQFL_TESTS_TEST_SUPPORT_HPP_
#define PQFL_TESTS_TEST_SUPPORT_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pqfl/bytes.hpp"
#include "pqfl/ring.hpp"

namespace pqfl::testing {

// O(n^2) product in Z_q[X]/(X^n + 1).
inline ring::Poly schoolbook_negacyclic(const ring::Poly& a, const ring::Poly& b) {
  const ring::RingParams p = a.params();
  const std::uint64_t q = p.q;
  std::vector<std::uint64_t> acc(p.n, 0);
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t j = 0; j < p.n; ++j) {
      const std::uint64_t prod = static_cast<std::uint64_t>(a[i]) * b[j] % q;
      const std::size_t k = i + j;
      if (k < p.n) {
        acc[k] = (acc[k] + prod) % q;
      } else {
        acc[k - p.n] = (acc[k - p.n] + q - prod) % q;
      }
    }
  }
  std::vector<std::uint32_t> out(acc.begin(), acc.end());
  return ring::Poly(p, std::move(out));
}

inline ring::Poly random_poly(ring::RingParams p, std::mt19937_64& gen) {
  std::uniform_int_distribution<std::uint32_t> dist(0, p.q - 1);
  std::vector<std::uint32_t> c(p.n);
  for (auto& v : c) v = dist(gen);
  return ring::Poly(p, std::move(c));
}

inline Seed32 seed_from(std::uint64_t x) {
  Seed32 s{};
  for (int i = 0; i < 8; ++i) s[i] = static_cast<std::uint8_t>(x >> (8 * i));
  s[31] = 0xA5;
  return s;
}

inline double l2_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace pqfl::testing

#endif  // PQFL_TESTS_TEST_SUPPORT_HPP_
