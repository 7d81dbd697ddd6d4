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

// Fiat-Shamir-with-aborts signatures over Module-SIS.
//
// Signing draws a masking vector y, commits to HighBits(A*y), derives a
// sparse challenge c from the commitment and the message, and releases
// z = y + c*s1 only when z and the low-order part of A*y - c*s2 are far
// enough from their bounds to leak nothing about the secret. There is no
// public-key compression and no hint vector: the full t is published and
// verification recomputes A*z - c*t directly.
//
// Signature encoding: z as signed two's-complement fields of
// bit_width(gamma1 - 1) + 1 bits (18 at defaults), little-endian bit stream,
// followed by the 32-byte challenge seed.

#ifndef PQFL_SIG_HPP_
#define PQFL_SIG_HPP_

#include <cstdint>
#include <stdexcept>
#include <utility>

#include "pqfl/bytes.hpp"
#include "pqfl/ring.hpp"

namespace pqfl::sig {

class SigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SigParams {
  ring::RingParams ring = ring::kSigRing;
  unsigned k = 4;                    // rows of A
  unsigned l = 4;                    // columns of A
  std::uint32_t gamma1 = 1u << 17;   // ||y||_inf < gamma1
  std::uint32_t beta = 78;           // tau * eta
  unsigned eta = 2;                  // secret coefficients in [-eta, eta]
  unsigned tau = 39;                 // nonzero challenge coefficients
  unsigned highbits_d = 17;          // w = HighBits(w) * 2^d + LowBits(w)

  void validate() const;

  friend bool operator==(const SigParams&, const SigParams&) = default;
};

inline constexpr unsigned kMaxSignAttempts = 1000;

struct SigPublicKey {
  SigParams params;
  Seed32 seed_a{};
  ring::PolyVec t;

  Bytes to_bytes() const;
  static SigPublicKey from_bytes(const SigParams& params, ByteView bytes);
};

struct SigSecretKey {
  ring::PolyVec s1;
  ring::PolyVec s2;
  Seed32 key_seed{};  // private input to masking-vector derivation
  Seed32 pk_hash{};
};

struct SigKeyPair {
  SigPublicKey pub;
  SigSecretKey secret;
};

struct Signature {
  ring::PolyVec z;
  Seed32 challenge_seed{};

  Bytes to_bytes(const SigParams& params) const;
  static Signature from_bytes(const SigParams& params, ByteView bytes);

  friend bool operator==(const Signature&, const Signature&) = default;
};

struct SignOutcome {
  Signature signature;
  unsigned attempts = 0;  // rejection-loop iterations, >= 1
};

// w in [0, q) split as w = high * 2^d + low with low in (-2^(d-1), 2^(d-1)].
struct Decomposition {
  std::uint32_t high;
  std::int32_t low;
};
Decomposition decompose(std::uint32_t w, unsigned d);

// Sparse challenge: exactly tau coefficients equal to +-1, the rest zero.
ring::Poly sample_in_ball(const SigParams& params, const Seed32& seed);

// A[i][j] = sample_uniform(ring, seed_a, 256*i + j), k x l, NTT form.
ring::NttMat expand_matrix(const SigParams& params, const Seed32& seed_a);

std::size_t signature_size(const SigParams& params);

SigKeyPair sig_keygen(const SigParams& params, const Seed32& rng_seed);

Signature sig_sign(const SigKeyPair& kp, ByteView message, const Seed32& rng_seed);
SignOutcome sig_sign_counted(const SigKeyPair& kp, ByteView message, const Seed32& rng_seed);

// Pure accept/reject; malformed input rejects.
bool sig_verify(const SigPublicKey& pk, ByteView message, const Signature& sig);
bool sig_verify(const SigPublicKey& pk, ByteView message, ByteView signature_bytes);

}  // namespace pqfl::sig

#endif  // PQFL_SIG_HPP_
