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

#include "pqfl/sig.hpp"

#include <bit>

#include "pqfl/xof.hpp"

namespace pqfl::sig {
namespace {

using ring::NttMat;
using ring::NttPoly;
using ring::NttVec;
using ring::Poly;
using ring::PolyVec;

constexpr std::string_view kTagKeygen = "pqfl.sig.keygen";
constexpr std::string_view kTagMu = "pqfl.sig.mu";
constexpr std::string_view kTagMask = "pqfl.sig.mask";
constexpr std::string_view kTagChallenge = "pqfl.sig.challenge";

unsigned z_field_bits(const SigParams& p) {
  return static_cast<unsigned>(std::bit_width(p.gamma1 - 1)) + 1;
}

// Uniform in [-eta, eta] by byte rejection.
Poly sample_small(const SigParams& p, const Seed32& seed, std::uint16_t nonce) {
  const unsigned range = 2 * p.eta + 1;
  const unsigned limit = 256 - 256 % range;
  Xof x(XofKind::kShake256);
  x.absorb(seed).absorb_u16(nonce);
  Poly out(p.ring);
  for (std::size_t i = 0; i < p.ring.n;) {
    const unsigned b = x.next_byte();
    if (b < limit) out.set(i++, static_cast<std::int64_t>(p.eta) - static_cast<std::int64_t>(b % range));
  }
  return out;
}

// Uniform in [-(gamma1 - 1), gamma1 - 1].
Poly sample_mask(const SigParams& p, const Seed32& seed, std::uint16_t nonce) {
  const std::uint32_t range = 2 * p.gamma1 - 1;
  const unsigned bits = static_cast<unsigned>(std::bit_width(range - 1));
  const std::uint32_t mask = (bits >= 32) ? 0xFFFFFFFFu : ((1u << bits) - 1);
  const unsigned nbytes = (bits + 7) / 8;
  Xof x(XofKind::kShake256);
  x.absorb(seed).absorb_u16(nonce);
  Poly out(p.ring);
  for (std::size_t i = 0; i < p.ring.n;) {
    std::uint32_t v = 0;
    for (unsigned b = 0; b < nbytes; ++b) v |= static_cast<std::uint32_t>(x.next_byte()) << (8 * b);
    v &= mask;
    if (v < range) out.set(i++, static_cast<std::int64_t>(v) - static_cast<std::int64_t>(p.gamma1 - 1));
  }
  return out;
}

Seed32 message_digest(const Seed32& pk_hash, ByteView message) {
  Xof x;
  x.absorb(kTagMu).absorb(pk_hash).absorb_u64(message.size()).absorb(message);
  return x.squeeze32();
}

Seed32 challenge_seed(const Seed32& mu, const PolyVec& w, unsigned d) {
  Xof x;
  x.absorb(kTagChallenge).absorb(mu);
  Bytes enc;
  for (const Poly& p : w) {
    for (std::uint32_t c : p.coeffs()) put_u32le(enc, decompose(c, d).high);
  }
  x.absorb(enc);
  return x.squeeze32();
}

bool high_bits_equal(const PolyVec& a, const PolyVec& b, unsigned d) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) {
      if (decompose(a[i][j], d).high != decompose(b[i][j], d).high) return false;
    }
  }
  return true;
}

std::uint32_t low_bits_norm(const PolyVec& w, unsigned d) {
  std::uint32_t m = 0;
  for (const Poly& p : w) {
    for (std::uint32_t c : p.coeffs()) {
      const std::int32_t lo = decompose(c, d).low;
      m = std::max(m, static_cast<std::uint32_t>(lo < 0 ? -lo : lo));
    }
  }
  return m;
}

// c * v for each entry of v (NTT form of c supplied).
PolyVec scale(const NttPoly& c_hat, const NttVec& v_hat) {
  PolyVec out;
  out.reserve(v_hat.size());
  for (const NttPoly& e : v_hat) out.push_back(ring::ntt_inverse(ring::ntt_pointwise(c_hat, e)));
  return out;
}

bool well_formed(const SigParams& p, const PolyVec& v, std::size_t len) {
  if (v.size() != len) return false;
  for (const Poly& e : v) {
    if (e.params() != p.ring) return false;
  }
  return true;
}

}  // namespace

void SigParams::validate() const {
  ring.validate();
  if (k < 1 || l < 1) throw SigError("k and l must be >= 1");
  if (eta < 1) throw SigError("eta must be >= 1");
  if (!(gamma1 > beta && beta > 0)) throw SigError("require gamma1 > beta > 0");
  if (gamma1 >= ring.q / 2) throw SigError("gamma1 must be below q/2");
  if (tau < 1 || tau > ring.n || tau > 64) throw SigError("tau must lie in [1, min(n, 64)]");
  if (ring.n > 256) throw SigError("challenge sampling supports n <= 256");
  if (highbits_d < 1 || highbits_d >= static_cast<unsigned>(std::bit_width(ring.q))) {
    throw SigError("highbits_d must lie in [1, bit-length of q)");
  }
}

Decomposition decompose(std::uint32_t w, unsigned d) {
  const std::uint32_t base = 1u << d;
  std::int64_t low = static_cast<std::int64_t>(w & (base - 1));
  if (low > static_cast<std::int64_t>(base / 2)) low -= base;
  const auto high = static_cast<std::uint32_t>((static_cast<std::int64_t>(w) - low) >> d);
  return {high, static_cast<std::int32_t>(low)};
}

Poly sample_in_ball(const SigParams& params, const Seed32& seed) {
  Xof x(XofKind::kShake256);
  x.absorb(seed);
  std::uint64_t signs = 0;
  for (int i = 0; i < 8; ++i) signs |= static_cast<std::uint64_t>(x.next_byte()) << (8 * i);

  std::vector<std::int64_t> c(params.ring.n, 0);
  for (std::size_t i = params.ring.n - params.tau; i < params.ring.n; ++i) {
    std::size_t j;
    do {
      j = x.next_byte();
    } while (j > i);
    c[i] = c[j];
    c[j] = (signs & 1) ? -1 : 1;
    signs >>= 1;
  }
  return Poly::from_signed(params.ring, c);
}

NttMat expand_matrix(const SigParams& params, const Seed32& seed_a) {
  std::vector<NttPoly> entries;
  entries.reserve(params.k * params.l);
  for (unsigned i = 0; i < params.k; ++i) {
    for (unsigned j = 0; j < params.l; ++j) {
      entries.push_back(ring::ntt_forward(ring::sample_uniform(params.ring, seed_a, static_cast<std::uint16_t>(256 * i + j))));
    }
  }
  return NttMat(params.k, params.l, std::move(entries));
}

std::size_t signature_size(const SigParams& params) {
  return (params.l * params.ring.n * z_field_bits(params) + 7) / 8 + 32;
}

Bytes SigPublicKey::to_bytes() const {
  Bytes out(seed_a.begin(), seed_a.end());
  for (const Poly& p : t) append(out, ring::poly_to_bytes(p));
  return out;
}

SigPublicKey SigPublicKey::from_bytes(const SigParams& params, ByteView bytes) {
  params.validate();
  const std::size_t poly_len = params.ring.n * ring::coeff_width_bytes(params.ring);
  if (bytes.size() != 32 + params.k * poly_len) throw DecodeError("signature public key has wrong length");
  ByteReader r(bytes);
  SigPublicKey pk;
  pk.params = params;
  ByteView seed = r.take(32);
  std::copy(seed.begin(), seed.end(), pk.seed_a.begin());
  for (unsigned i = 0; i < params.k; ++i) pk.t.push_back(ring::poly_from_bytes(params.ring, r.take(poly_len)));
  return pk;
}

Bytes Signature::to_bytes(const SigParams& params) const {
  if (!well_formed(params, z, params.l)) throw SigError("signature has wrong shape");
  const unsigned bits = z_field_bits(params);
  const std::uint64_t mask = (1ULL << bits) - 1;
  Bytes out;
  out.reserve(signature_size(params));
  std::uint64_t acc = 0;
  unsigned held = 0;
  for (const Poly& p : z) {
    for (std::uint32_t c : p.coeffs()) {
      const std::int64_t v = ring::centered(c, params.ring.q);
      acc |= (static_cast<std::uint64_t>(v) & mask) << held;
      held += bits;
      while (held >= 8) {
        out.push_back(static_cast<std::uint8_t>(acc));
        acc >>= 8;
        held -= 8;
      }
    }
  }
  if (held > 0) out.push_back(static_cast<std::uint8_t>(acc));
  append(out, challenge_seed);
  return out;
}

Signature Signature::from_bytes(const SigParams& params, ByteView bytes) {
  if (bytes.size() != signature_size(params)) throw DecodeError("signature has wrong length");
  const unsigned bits = z_field_bits(params);
  const std::int64_t sign_bit = 1LL << (bits - 1);
  Signature sig;
  std::size_t bit = 0;
  for (unsigned i = 0; i < params.l; ++i) {
    std::vector<std::int64_t> vals(params.ring.n);
    for (auto& v : vals) {
      std::int64_t raw = 0;
      for (unsigned j = 0; j < bits; ++j, ++bit) raw |= static_cast<std::int64_t>((bytes[bit / 8] >> (bit % 8)) & 1) << j;
      v = (raw & sign_bit) ? raw - (sign_bit << 1) : raw;
    }
    sig.z.push_back(Poly::from_signed(params.ring, vals));
  }
  std::copy(bytes.end() - 32, bytes.end(), sig.challenge_seed.begin());
  return sig;
}

SigKeyPair sig_keygen(const SigParams& params, const Seed32& rng_seed) {
  params.validate();
  Xof x;
  x.absorb(kTagKeygen).absorb(rng_seed);
  const Seed32 rho = x.squeeze32();
  const Seed32 rho_secret = x.squeeze32();
  const Seed32 key_seed = x.squeeze32();

  PolyVec s1;
  PolyVec s2;
  for (unsigned i = 0; i < params.l; ++i) s1.push_back(sample_small(params, rho_secret, static_cast<std::uint16_t>(i)));
  for (unsigned i = 0; i < params.k; ++i) s2.push_back(sample_small(params, rho_secret, static_cast<std::uint16_t>(params.l + i)));

  const NttMat a_hat = expand_matrix(params, rho);
  PolyVec t = ring::polyvec_add(ring::ntt_inverse(ring::ntt_mat_vec(a_hat, ring::ntt_forward(s1))), s2);

  SigKeyPair kp{SigPublicKey{params, rho, std::move(t)}, SigSecretKey{std::move(s1), std::move(s2), key_seed, {}}};
  kp.secret.pk_hash = sha3_256(kp.pub.to_bytes());
  return kp;
}

SignOutcome sig_sign_counted(const SigKeyPair& kp, ByteView message, const Seed32& rng_seed) {
  const SigParams& p = kp.pub.params;
  p.validate();
  const Seed32 mu = message_digest(kp.secret.pk_hash, message);
  Xof mx;
  mx.absorb(kTagMask).absorb(kp.secret.key_seed).absorb(rng_seed).absorb(mu);
  const Seed32 mask_seed = mx.squeeze32();

  const NttMat a_hat = expand_matrix(p, kp.pub.seed_a);
  const NttVec s1_hat = ring::ntt_forward(kp.secret.s1);
  const NttVec s2_hat = ring::ntt_forward(kp.secret.s2);
  const std::uint32_t low_bound = (1u << (p.highbits_d - 1)) - p.beta;

  for (unsigned attempt = 0; attempt < kMaxSignAttempts; ++attempt) {
    PolyVec y;
    for (unsigned i = 0; i < p.l; ++i) y.push_back(sample_mask(p, mask_seed, static_cast<std::uint16_t>(attempt * p.l + i)));
    const PolyVec w = ring::ntt_inverse(ring::ntt_mat_vec(a_hat, ring::ntt_forward(y)));

    Signature sig;
    sig.challenge_seed = challenge_seed(mu, w, p.highbits_d);
    const NttPoly c_hat = ring::ntt_forward(sample_in_ball(p, sig.challenge_seed));

    sig.z = ring::polyvec_add(y, scale(c_hat, s1_hat));
    if (ring::inf_norm(sig.z) >= p.gamma1 - p.beta) continue;

    const PolyVec r = ring::polyvec_sub(w, scale(c_hat, s2_hat));
    if (low_bits_norm(r, p.highbits_d) >= low_bound) continue;
    if (!high_bits_equal(r, w, p.highbits_d)) continue;

    return {std::move(sig), attempt + 1};
  }
  throw SigError("signing exceeded the rejection-loop cap; parameters are misconfigured");
}

Signature sig_sign(const SigKeyPair& kp, ByteView message, const Seed32& rng_seed) {
  return sig_sign_counted(kp, message, rng_seed).signature;
}

bool sig_verify(const SigPublicKey& pk, ByteView message, const Signature& sig) {
  const SigParams& p = pk.params;
  try {
    p.validate();
  } catch (const std::invalid_argument&) {
    return false;
  }
  if (!well_formed(p, sig.z, p.l) || !well_formed(p, pk.t, p.k)) return false;
  if (ring::inf_norm(sig.z) >= p.gamma1 - p.beta) return false;

  const NttMat a_hat = expand_matrix(p, pk.seed_a);
  const NttPoly c_hat = ring::ntt_forward(sample_in_ball(p, sig.challenge_seed));
  const PolyVec az = ring::ntt_inverse(ring::ntt_mat_vec(a_hat, ring::ntt_forward(sig.z)));
  const PolyVec w = ring::polyvec_sub(az, scale(c_hat, ring::ntt_forward(pk.t)));

  const Seed32 mu = message_digest(sha3_256(pk.to_bytes()), message);
  return challenge_seed(mu, w, p.highbits_d) == sig.challenge_seed;
}

bool sig_verify(const SigPublicKey& pk, ByteView message, ByteView signature_bytes) {
  try {
    return sig_verify(pk, message, Signature::from_bytes(pk.params, signature_bytes));
  } catch (const DecodeError&) {
    return false;
  }
}

}  // namespace pqfl::sig
