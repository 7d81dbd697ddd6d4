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

#include "pqfl/kem.hpp"

#include <bit>

#include "pqfl/xof.hpp"

namespace pqfl::kem {
namespace {

using ring::NttMat;
using ring::NttPoly;
using ring::NttVec;
using ring::Poly;
using ring::PolyVec;

constexpr std::string_view kTagKeygen = "pqfl.kem.keygen";
constexpr std::string_view kTagMessage = "pqfl.kem.message";
constexpr std::string_view kTagCoins = "pqfl.kem.coins";
constexpr std::string_view kTagSecret = "pqfl.kem.secret";
constexpr std::string_view kTagReject = "pqfl.kem.reject";
constexpr std::size_t kMessageBits = 256;

std::uint16_t compress(std::uint32_t x, unsigned d, std::uint32_t q) {
  const std::uint64_t scaled = (static_cast<std::uint64_t>(x) << d) + q / 2;
  return static_cast<std::uint16_t>((scaled / q) & ((1u << d) - 1));
}

std::uint32_t decompress(std::uint16_t y, unsigned d, std::uint32_t q) {
  return static_cast<std::uint32_t>((static_cast<std::uint64_t>(y) * q + (1u << (d - 1))) >> d);
}

void pack_bits(Bytes& out, const std::vector<std::uint16_t>& values, unsigned d) {
  std::uint64_t acc = 0;
  unsigned held = 0;
  for (std::uint16_t v : values) {
    acc |= static_cast<std::uint64_t>(v) << held;
    held += d;
    while (held >= 8) {
      out.push_back(static_cast<std::uint8_t>(acc));
      acc >>= 8;
      held -= 8;
    }
  }
  if (held > 0) out.push_back(static_cast<std::uint8_t>(acc));
}

std::vector<std::uint16_t> unpack_bits(ByteView in, std::size_t count, unsigned d) {
  std::vector<std::uint16_t> out(count);
  std::size_t bit = 0;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t v = 0;
    for (unsigned j = 0; j < d; ++j, ++bit) v |= static_cast<std::uint32_t>((in[bit / 8] >> (bit % 8)) & 1) << j;
    out[i] = static_cast<std::uint16_t>(v);
  }
  return out;
}

std::size_t packed_size(std::size_t count, unsigned d) { return (count * d + 7) / 8; }

Poly message_to_poly(const KemParams& p, const Seed32& m) {
  Poly out(p.ring);
  const std::uint32_t half = (p.ring.q + 1) / 2;
  for (std::size_t i = 0; i < kMessageBits; ++i) {
    if ((m[i / 8] >> (i % 8)) & 1) out.set(i, half);
  }
  return out;
}

Seed32 poly_to_message(const KemParams& p, const Poly& w) {
  Seed32 m{};
  for (std::size_t i = 0; i < kMessageBits; ++i) {
    if (compress(w[i], 1, p.ring.q) & 1) m[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  return m;
}

Seed32 derive_coins(const Seed32& m, const Seed32& pk_hash) {
  Xof x;
  x.absorb(kTagCoins).absorb(m).absorb(pk_hash);
  return x.squeeze32();
}

Seed32 hash_ct(const KemParams& p, const KemCiphertext& ct) { return sha3_256(ct.to_bytes(p)); }

SharedSecret derive_secret(std::string_view tag, const Seed32& key, const Seed32& ct_hash) {
  Xof x;
  x.absorb(tag).absorb(key).absorb(ct_hash);
  SharedSecret s;
  x.squeeze(std::span<std::uint8_t>(s.bytes));
  return s;
}

KemCiphertext pke_encrypt(const KemPublicKey& pk, const Seed32& m, const Seed32& coins) {
  const KemParams& p = pk.params;
  PolyVec r;
  PolyVec e1;
  for (unsigned i = 0; i < p.k; ++i) r.push_back(ring::sample_cbd(p.ring, coins, static_cast<std::uint16_t>(i), p.eta1));
  for (unsigned i = 0; i < p.k; ++i) {
    e1.push_back(ring::sample_cbd(p.ring, coins, static_cast<std::uint16_t>(p.k + i), p.eta2));
  }
  const Poly e2 = ring::sample_cbd(p.ring, coins, static_cast<std::uint16_t>(2 * p.k), p.eta2);

  const NttMat a_hat = expand_matrix(p, pk.seed_a);
  const NttVec r_hat = ring::ntt_forward(r);
  const PolyVec u = ring::polyvec_add(ring::ntt_inverse(ring::ntt_mat_vec(a_hat, r_hat, true)), e1);
  const NttVec t_hat = ring::ntt_forward(pk.t);
  const Poly v = ring::poly_add(ring::poly_add(ring::ntt_inverse(ring::ntt_dot(t_hat, r_hat)), e2),
                                message_to_poly(p, m));

  KemCiphertext ct;
  for (const Poly& ui : u) {
    std::vector<std::uint16_t> c(p.ring.n);
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = compress(ui[j], p.du, p.ring.q);
    ct.u.push_back(std::move(c));
  }
  ct.v.resize(p.ring.n);
  for (std::size_t j = 0; j < ct.v.size(); ++j) ct.v[j] = compress(v[j], p.dv, p.ring.q);
  return ct;
}

Seed32 pke_decrypt(const KemParams& p, const PolyVec& s, const KemCiphertext& ct) {
  PolyVec u;
  for (const auto& ci : ct.u) {
    Poly ui(p.ring);
    auto o = ui.mutable_coeffs();
    for (std::size_t j = 0; j < o.size(); ++j) o[j] = decompress(ci[j], p.du, p.ring.q);
    u.push_back(std::move(ui));
  }
  Poly v(p.ring);
  auto vo = v.mutable_coeffs();
  for (std::size_t j = 0; j < vo.size(); ++j) vo[j] = decompress(ct.v[j], p.dv, p.ring.q);

  const Poly su = ring::ntt_inverse(ring::ntt_dot(ring::ntt_forward(s), ring::ntt_forward(u)));
  return poly_to_message(p, ring::poly_sub(v, su));
}

void check_structure(const KemParams& p, const KemCiphertext& ct) {
  if (ct.u.size() != p.k || ct.v.size() != p.ring.n) throw KemError("ciphertext has wrong shape");
  for (const auto& ui : ct.u) {
    if (ui.size() != p.ring.n) throw KemError("ciphertext has wrong shape");
    for (std::uint16_t c : ui) {
      if (c >> p.du) throw KemError("ciphertext value exceeds du bits");
    }
  }
  for (std::uint16_t c : ct.v) {
    if (c >> p.dv) throw KemError("ciphertext value exceeds dv bits");
  }
}

}  // namespace

void KemParams::validate() const {
  ring.validate();
  if (ring.n < kMessageBits) throw KemError("KEM requires n >= 256");
  if (k < 1) throw KemError("module rank k must be >= 1");
  if ((eta1 != 2 && eta1 != 3) || (eta2 != 2 && eta2 != 3)) throw KemError("eta1, eta2 must be 2 or 3");
  const auto qbits = static_cast<unsigned>(std::bit_width(ring.q));
  if (du < 1 || dv < 1 || du > qbits || dv > qbits || du > 16 || dv > 16) {
    throw KemError("du, dv must lie in [1, bit-length of q]");
  }
}

std::size_t public_key_size(const KemParams& params) {
  return 32 + params.k * params.ring.n * ring::coeff_width_bytes(params.ring);
}

std::size_t ciphertext_size(const KemParams& params) {
  return params.k * packed_size(params.ring.n, params.du) + packed_size(params.ring.n, params.dv);
}

Bytes KemPublicKey::to_bytes() const {
  Bytes out(seed_a.begin(), seed_a.end());
  for (const Poly& p : t) append(out, ring::poly_to_bytes(p));
  return out;
}

KemPublicKey KemPublicKey::from_bytes(const KemParams& params, ByteView bytes) {
  params.validate();
  if (bytes.size() != public_key_size(params)) throw DecodeError("KEM public key has wrong length");
  ByteReader r(bytes);
  KemPublicKey pk;
  pk.params = params;
  ByteView seed = r.take(32);
  std::copy(seed.begin(), seed.end(), pk.seed_a.begin());
  const std::size_t poly_len = params.ring.n * ring::coeff_width_bytes(params.ring);
  for (unsigned i = 0; i < params.k; ++i) pk.t.push_back(ring::poly_from_bytes(params.ring, r.take(poly_len)));
  return pk;
}

Bytes KemCiphertext::to_bytes(const KemParams& params) const {
  check_structure(params, *this);
  Bytes out;
  out.reserve(ciphertext_size(params));
  for (const auto& ui : u) pack_bits(out, ui, params.du);
  pack_bits(out, v, params.dv);
  return out;
}

KemCiphertext KemCiphertext::from_bytes(const KemParams& params, ByteView bytes) {
  if (bytes.size() != ciphertext_size(params)) throw DecodeError("KEM ciphertext has wrong length");
  KemCiphertext ct;
  ByteReader r(bytes);
  const std::size_t u_len = packed_size(params.ring.n, params.du);
  for (unsigned i = 0; i < params.k; ++i) ct.u.push_back(unpack_bits(r.take(u_len), params.ring.n, params.du));
  ct.v = unpack_bits(r.take(packed_size(params.ring.n, params.dv)), params.ring.n, params.dv);
  return ct;
}

NttMat expand_matrix(const KemParams& params, const Seed32& seed_a) {
  std::vector<NttPoly> entries;
  entries.reserve(params.k * params.k);
  for (unsigned i = 0; i < params.k; ++i) {
    for (unsigned j = 0; j < params.k; ++j) {
      entries.push_back(ring::ntt_forward(ring::sample_uniform(params.ring, seed_a, static_cast<std::uint16_t>(256 * i + j))));
    }
  }
  return NttMat(params.k, params.k, std::move(entries));
}

KeygenTrace kem_keygen_traced(const KemParams& params, const Seed32& rng_seed, KeygenOptions options) {
  params.validate();
  Xof x;
  x.absorb(kTagKeygen).absorb(rng_seed);
  const Seed32 rho = x.squeeze32();
  const Seed32 sigma = x.squeeze32();
  const Seed32 z = x.squeeze32();

  PolyVec s;
  PolyVec e;
  for (unsigned i = 0; i < params.k; ++i) s.push_back(ring::sample_cbd(params.ring, sigma, static_cast<std::uint16_t>(i), params.eta1));
  for (unsigned i = 0; i < params.k; ++i) {
    e.push_back(options.zero_noise ? Poly(params.ring)
                                   : ring::sample_cbd(params.ring, sigma, static_cast<std::uint16_t>(params.k + i), params.eta1));
  }

  const NttMat a_hat = expand_matrix(params, rho);
  PolyVec t = ring::polyvec_add(ring::ntt_inverse(ring::ntt_mat_vec(a_hat, ring::ntt_forward(s))), e);

  KeygenTrace out{KemKeyPair{KemPublicKey{params, rho, std::move(t)}, KemSecretKey{std::move(s), z, {}}}, std::move(e)};
  out.keys.secret.pk_hash = sha3_256(out.keys.pub.to_bytes());
  return out;
}

KemKeyPair kem_keygen(const KemParams& params, const Seed32& rng_seed) {
  return kem_keygen_traced(params, rng_seed).keys;
}

Encapsulation kem_encapsulate(const KemPublicKey& pk, const Seed32& rng_seed) {
  pk.params.validate();
  if (pk.t.size() != pk.params.k) throw KemError("malformed public key");
  for (const Poly& p : pk.t) {
    if (p.params() != pk.params.ring) throw KemError("malformed public key");
  }
  Xof x;
  x.absorb(kTagMessage).absorb(rng_seed);
  const Seed32 m = x.squeeze32();
  const Seed32 pk_hash = sha3_256(pk.to_bytes());

  Encapsulation out;
  out.ct = pke_encrypt(pk, m, derive_coins(m, pk_hash));
  out.secret = derive_secret(kTagSecret, m, hash_ct(pk.params, out.ct));
  return out;
}

SharedSecret kem_decapsulate(const KemKeyPair& kp, const KemCiphertext& ct) {
  const KemParams& p = kp.pub.params;
  check_structure(p, ct);
  const Seed32 m = pke_decrypt(p, kp.secret.s, ct);
  const KemCiphertext reencrypted = pke_encrypt(kp.pub, m, derive_coins(m, kp.secret.pk_hash));
  const Seed32 ct_hash = hash_ct(p, ct);
  if (reencrypted == ct) return derive_secret(kTagSecret, m, ct_hash);
  return derive_secret(kTagReject, kp.secret.z_reject, ct_hash);
}

}  // namespace pqfl::kem
