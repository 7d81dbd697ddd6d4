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

#include <algorithm>
#include <bit>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "pqfl/xof.hpp"

namespace pqfl::ring {
namespace {

std::uint32_t mul_mod(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
  return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % q);
}

std::uint32_t add_mod(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
  std::uint32_t s = a + b;
  return s >= q ? s - q : s;
}

std::uint32_t sub_mod(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
  return a >= b ? a - b : a + q - b;
}

std::uint32_t pow_mod(std::uint32_t base, std::uint64_t exp, std::uint32_t q) {
  std::uint64_t result = 1 % q;
  std::uint64_t b = base % q;
  while (exp > 0) {
    if (exp & 1) result = result * b % q;
    b = b * b % q;
    exp >>= 1;
  }
  return static_cast<std::uint32_t>(result);
}

bool is_prime(std::uint32_t v) {
  if (v < 2) return false;
  if (v % 2 == 0) return v == 2;
  for (std::uint32_t d = 3; static_cast<std::uint64_t>(d) * d <= v; d += 2) {
    if (v % d == 0) return false;
  }
  return true;
}

std::vector<std::uint32_t> prime_factors(std::uint32_t v) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= v; ++d) {
    if (v % d == 0) {
      out.push_back(d);
      while (v % d == 0) v /= d;
    }
  }
  if (v > 1) out.push_back(v);
  return out;
}

std::uint32_t bit_reverse(std::uint32_t x, unsigned bits) {
  std::uint32_t r = 0;
  for (unsigned i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

struct NttTables {
  std::uint32_t base_degree = 1;          // 1: complete transform, 2: stops one level early
  std::vector<std::uint32_t> zetas;       // zeta^{bitrev(k)}, k in [0, n/base_degree)
  std::vector<std::uint32_t> zetas_inv;   // inverses of the above
  std::vector<std::uint32_t> gammas;      // X^base_degree - gamma_i residue moduli
  std::uint32_t inv_scale = 1;            // (n/base_degree)^{-1} mod q
};

std::unique_ptr<NttTables> build_tables(RingParams params) {
  params.validate();
  const std::uint32_t n = params.n;
  const std::uint32_t q = params.q;
  auto t = std::make_unique<NttTables>();
  t->base_degree = ((q - 1) % (2 * n) == 0) ? 1 : 2;

  const std::uint32_t blocks = n / t->base_degree;
  const unsigned levels = static_cast<unsigned>(std::countr_zero(blocks));
  const std::uint32_t root_order = 2 * blocks;

  std::uint32_t generator = 2;
  const auto factors = prime_factors(q - 1);
  for (;; ++generator) {
    bool ok = true;
    for (std::uint32_t f : factors) {
      if (pow_mod(generator, (q - 1) / f, q) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) break;
  }
  const std::uint32_t zeta = pow_mod(generator, (q - 1) / root_order, q);

  t->zetas.resize(blocks);
  t->zetas_inv.resize(blocks);
  t->gammas.resize(blocks);
  for (std::uint32_t k = 0; k < blocks; ++k) {
    const std::uint32_t e = bit_reverse(k, levels);
    t->zetas[k] = pow_mod(zeta, e, q);
    t->zetas_inv[k] = pow_mod(t->zetas[k], q - 2, q);
    t->gammas[k] = pow_mod(zeta, 2ULL * e + 1, q);
  }
  t->inv_scale = pow_mod(blocks % q, q - 2, q);
  return t;
}

const NttTables& tables_for(const RingParams& params) {
  static std::mutex mu;
  static std::map<std::pair<std::uint32_t, std::uint32_t>, std::unique_ptr<NttTables>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{params.n, params.q}];
  if (!slot) slot = build_tables(params);
  return *slot;
}

template <class P>
void require_same(const P& a, const P& b) {
  if (a.params() != b.params()) throw RingError("mismatched ring parameters");
}

template <class P>
P add_impl(const P& a, const P& b) {
  require_same(a, b);
  P out(a.params());
  auto o = out.mutable_coeffs();
  const std::uint32_t q = a.params().q;
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = add_mod(a[i], b[i], q);
  return out;
}

}  // namespace

void RingParams::validate() const {
  if (n < 2 || !std::has_single_bit(n)) throw RingError("n must be a power of two >= 2");
  if (q < 3 || q >= (1U << 31) || !is_prime(q)) throw RingError("q must be an odd prime below 2^31");
  if ((q - 1) % n != 0) throw RingError("q must be congruent to 1 mod n");
}

std::uint32_t inf_norm(const Poly& p) {
  std::uint32_t m = 0;
  const std::uint32_t q = p.params().q;
  for (std::uint32_t c : p.coeffs()) {
    std::int64_t v = centered(c, q);
    m = std::max(m, static_cast<std::uint32_t>(v < 0 ? -v : v));
  }
  return m;
}

std::uint32_t inf_norm(const PolyVec& v) {
  std::uint32_t m = 0;
  for (const Poly& p : v) m = std::max(m, inf_norm(p));
  return m;
}

Poly poly_add(const Poly& a, const Poly& b) { return add_impl(a, b); }

NttPoly ntt_add(const NttPoly& a, const NttPoly& b) { return add_impl(a, b); }

Poly poly_sub(const Poly& a, const Poly& b) {
  require_same(a, b);
  Poly out(a.params());
  auto o = out.mutable_coeffs();
  const std::uint32_t q = a.params().q;
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = sub_mod(a[i], b[i], q);
  return out;
}

NttPoly ntt_forward(const Poly& a) {
  const NttTables& t = tables_for(a.params());
  const std::uint32_t n = a.params().n;
  const std::uint32_t q = a.params().q;
  std::vector<std::uint32_t> f(a.coeffs().begin(), a.coeffs().end());
  std::uint32_t k = 1;
  for (std::uint32_t len = n / 2; len >= t.base_degree; len >>= 1) {
    for (std::uint32_t start = 0; start < n; start += 2 * len) {
      const std::uint32_t z = t.zetas[k++];
      for (std::uint32_t j = start; j < start + len; ++j) {
        const std::uint32_t v = mul_mod(z, f[j + len], q);
        f[j + len] = sub_mod(f[j], v, q);
        f[j] = add_mod(f[j], v, q);
      }
    }
  }
  return NttPoly(a.params(), std::move(f));
}

Poly ntt_inverse(const NttPoly& a_hat) {
  const NttTables& t = tables_for(a_hat.params());
  const std::uint32_t n = a_hat.params().n;
  const std::uint32_t q = a_hat.params().q;
  std::vector<std::uint32_t> f(a_hat.coeffs().begin(), a_hat.coeffs().end());
  for (std::uint32_t len = t.base_degree; len <= n / 2; len <<= 1) {
    const std::uint32_t first_k = n / (2 * len);
    for (std::uint32_t start = 0, block = 0; start < n; start += 2 * len, ++block) {
      const std::uint32_t z_inv = t.zetas_inv[first_k + block];
      for (std::uint32_t j = start; j < start + len; ++j) {
        const std::uint32_t x = f[j];
        const std::uint32_t y = f[j + len];
        f[j] = add_mod(x, y, q);
        f[j + len] = mul_mod(z_inv, sub_mod(x, y, q), q);
      }
    }
  }
  for (std::uint32_t& c : f) c = mul_mod(c, t.inv_scale, q);
  return Poly(a_hat.params(), std::move(f));
}

NttPoly ntt_pointwise(const NttPoly& a, const NttPoly& b) {
  require_same(a, b);
  const NttTables& t = tables_for(a.params());
  const std::uint32_t q = a.params().q;
  NttPoly out(a.params());
  auto o = out.mutable_coeffs();
  if (t.base_degree == 1) {
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = mul_mod(a[i], b[i], q);
    return out;
  }
  // (a0 + a1 X)(b0 + b1 X) mod (X^2 - gamma)
  for (std::size_t i = 0; i < t.gammas.size(); ++i) {
    const std::size_t j = 2 * i;
    const std::uint32_t hi = mul_mod(mul_mod(a[j + 1], b[j + 1], q), t.gammas[i], q);
    o[j] = add_mod(mul_mod(a[j], b[j], q), hi, q);
    o[j + 1] = add_mod(mul_mod(a[j], b[j + 1], q), mul_mod(a[j + 1], b[j], q), q);
  }
  return out;
}

Poly poly_mul_negacyclic(const Poly& a, const Poly& b) {
  require_same(a, b);
  return ntt_inverse(ntt_pointwise(ntt_forward(a), ntt_forward(b)));
}

PolyVec polyvec_add(const PolyVec& a, const PolyVec& b) {
  if (a.size() != b.size()) throw RingError("vector length mismatch");
  PolyVec out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(poly_add(a[i], b[i]));
  return out;
}

PolyVec polyvec_sub(const PolyVec& a, const PolyVec& b) {
  if (a.size() != b.size()) throw RingError("vector length mismatch");
  PolyVec out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(poly_sub(a[i], b[i]));
  return out;
}

NttVec ntt_forward(const PolyVec& v) {
  NttVec out;
  out.reserve(v.size());
  for (const Poly& p : v) out.push_back(ntt_forward(p));
  return out;
}

PolyVec ntt_inverse(const NttVec& v) {
  PolyVec out;
  out.reserve(v.size());
  for (const NttPoly& p : v) out.push_back(ntt_inverse(p));
  return out;
}

NttPoly ntt_dot(const NttVec& a, const NttVec& b) {
  if (a.empty() || a.size() != b.size()) throw RingError("vector length mismatch");
  NttPoly acc = ntt_pointwise(a[0], b[0]);
  for (std::size_t i = 1; i < a.size(); ++i) acc = ntt_add(acc, ntt_pointwise(a[i], b[i]));
  return acc;
}

NttVec ntt_mat_vec(const NttMat& m, const NttVec& v, bool transpose) {
  const std::size_t out_len = transpose ? m.cols() : m.rows();
  const std::size_t inner = transpose ? m.rows() : m.cols();
  if (v.size() != inner || inner == 0) throw RingError("matrix/vector dimension mismatch");
  NttVec out;
  out.reserve(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    const NttPoly& first = transpose ? m.at(0, i) : m.at(i, 0);
    NttPoly acc = ntt_pointwise(first, v[0]);
    for (std::size_t j = 1; j < inner; ++j) {
      const NttPoly& e = transpose ? m.at(j, i) : m.at(i, j);
      acc = ntt_add(acc, ntt_pointwise(e, v[j]));
    }
    out.push_back(std::move(acc));
  }
  return out;
}

Poly sample_uniform(RingParams params, const Seed32& seed, std::uint16_t nonce) {
  params.validate();
  const unsigned bits = static_cast<unsigned>(std::bit_width(params.q - 1));
  const unsigned nbytes = (bits + 7) / 8;
  const std::uint32_t mask = bits >= 32 ? 0xFFFFFFFFu : ((1u << bits) - 1);

  Xof xof(XofKind::kShake128);
  xof.absorb(seed).absorb_u16(nonce);
  Poly out(params);
  auto o = out.mutable_coeffs();
  std::size_t filled = 0;
  while (filled < params.n) {
    std::uint32_t v = 0;
    for (unsigned b = 0; b < nbytes; ++b) v |= static_cast<std::uint32_t>(xof.next_byte()) << (8 * b);
    v &= mask;
    if (v < params.q) o[filled++] = v;
  }
  return out;
}

Poly sample_cbd(RingParams params, const Seed32& seed, std::uint16_t nonce, unsigned eta) {
  if (eta != 2 && eta != 3) throw RingError("centered binomial eta must be 2 or 3");
  params.validate();
  const std::size_t total_bits = static_cast<std::size_t>(params.n) * 2 * eta;
  Xof xof(XofKind::kShake256);
  xof.absorb(seed).absorb_u16(nonce);
  const Bytes stream = xof.squeeze((total_bits + 7) / 8);
  auto bit = [&](std::size_t i) { return (stream[i / 8] >> (i % 8)) & 1; };

  Poly out(params);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < params.n; ++i) {
    int a = 0;
    int b = 0;
    for (unsigned j = 0; j < eta; ++j) a += bit(pos++);
    for (unsigned j = 0; j < eta; ++j) b += bit(pos++);
    out.set(i, a - b);
  }
  return out;
}

std::size_t coeff_width_bytes(RingParams params) { return params.q <= (1u << 16) ? 2 : 4; }

Bytes poly_to_bytes(const Poly& p) {
  const std::size_t w = coeff_width_bytes(p.params());
  Bytes out;
  out.reserve(p.size() * w);
  for (std::uint32_t c : p.coeffs()) {
    if (w == 2) {
      put_u16le(out, static_cast<std::uint16_t>(c));
    } else {
      put_u32le(out, c);
    }
  }
  return out;
}

Poly poly_from_bytes(RingParams params, ByteView bytes) {
  const std::size_t w = coeff_width_bytes(params);
  if (bytes.size() != params.n * w) throw DecodeError("polynomial encoding has wrong length");
  ByteReader r(bytes);
  std::vector<std::uint32_t> c(params.n);
  for (auto& v : c) {
    v = (w == 2) ? r.u16le() : r.u32le();
    if (v >= params.q) throw DecodeError("polynomial coefficient outside [0, q)");
  }
  return Poly(params, std::move(c));
}

}  // namespace pqfl::ring
