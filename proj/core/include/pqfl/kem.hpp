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

// Module-LWE key encapsulation.
//
// Key generation builds t = A*s + e over R_q^k with A expanded from a public
// seed and s, e drawn from the centered binomial distribution. Encapsulation
// is LPR public-key encryption of a random 256-bit message, made
// chosen-ciphertext robust with a Fujisaki-Okamoto re-encryption check;
// decapsulation failures yield a pseudorandom implicit-rejection secret
// rather than an error.
//
// Encodings are local to this project (not FIPS 203 byte-compatible):
//   public key  = seed_A || t, 16-bit LE per coefficient
//   ciphertext  = u || v, each value packed little-endian in du / dv bits

#ifndef PQFL_KEM_HPP_
#define PQFL_KEM_HPP_

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pqfl/bytes.hpp"
#include "pqfl/ring.hpp"

namespace pqfl::kem {

class KemError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct KemParams {
  ring::RingParams ring = ring::kKemRing;
  unsigned k = 2;
  unsigned eta1 = 3;
  unsigned eta2 = 2;
  unsigned du = 10;
  unsigned dv = 4;

  void validate() const;

  friend bool operator==(const KemParams&, const KemParams&) = default;
};

// Rank-2 defaults, close to the Kyber-512 parameter family.
inline KemParams default_kem_params() { return KemParams{}; }
// Rank-3 set used as the comparison point in overhead benchmarks.
inline KemParams rank3_kem_params() { return KemParams{ring::kKemRing, 3, 2, 2, 10, 4}; }

struct KemPublicKey {
  KemParams params;
  Seed32 seed_a{};
  ring::PolyVec t;

  Bytes to_bytes() const;
  static KemPublicKey from_bytes(const KemParams& params, ByteView bytes);
};

struct KemSecretKey {
  ring::PolyVec s;
  Seed32 z_reject{};   // implicit-rejection key
  Seed32 pk_hash{};    // SHA3-256 of the public key encoding
};

struct KemKeyPair {
  KemPublicKey pub;
  KemSecretKey secret;
};

struct KemCiphertext {
  std::vector<std::vector<std::uint16_t>> u;  // k compressed polynomials
  std::vector<std::uint16_t> v;

  Bytes to_bytes(const KemParams& params) const;
  static KemCiphertext from_bytes(const KemParams& params, ByteView bytes);

  friend bool operator==(const KemCiphertext&, const KemCiphertext&) = default;
};

struct SharedSecret {
  std::array<std::uint8_t, 32> bytes{};
  friend bool operator==(const SharedSecret&, const SharedSecret&) = default;
};

struct Encapsulation {
  KemCiphertext ct;
  SharedSecret secret;
};

struct KeygenOptions {
  bool zero_noise = false;  // test hook: e = 0 so that t = A*s exactly
};

struct KeygenTrace {
  KemKeyPair keys;
  ring::PolyVec e;
};

std::size_t public_key_size(const KemParams& params);
std::size_t ciphertext_size(const KemParams& params);

// A[i][j] = sample_uniform(ring, seed_a, 256*i + j), returned in NTT form.
ring::NttMat expand_matrix(const KemParams& params, const Seed32& seed_a);

KemKeyPair kem_keygen(const KemParams& params, const Seed32& rng_seed);
KeygenTrace kem_keygen_traced(const KemParams& params, const Seed32& rng_seed,
                              KeygenOptions options = {});

Encapsulation kem_encapsulate(const KemPublicKey& pk, const Seed32& rng_seed);

// Throws KemError only for structurally malformed ciphertexts (wrong shape or
// out-of-range compressed values).
SharedSecret kem_decapsulate(const KemKeyPair& kp, const KemCiphertext& ct);

}  // namespace pqfl::kem

#endif  // PQFL_KEM_HPP_
