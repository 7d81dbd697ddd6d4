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

// Wire formats shared by the round engine, the aggregator, and the
// eavesdropper.
//
// SignedCipherUpdate:
//   round u32 || client_id u32 || u32 len + KEM ciphertext
//   || u32 len + payload || u32 len + signature            (all little-endian)
// The signature covers every field before it.
//
// Setup announcements (phase S), first byte is the kind:
//   1 session  : suite u8 || quant scale f64 || dim u32 || n_clients u32
//   2 KEM key  : k, eta1, eta2, du, dv (u8 each) || n u32 || q u32 || u32 len + key
//   3 RSA key  : modulus u64 || exponent u64
//   4 sig key  : k, l, eta, tau, d (u8 each) || gamma1 u32 || beta u32
//                || n u32 || q u32 || u32 len + key
//
// Model broadcast (phase C): round u32 || count u32 || f64 LE per value.

#ifndef PQFL_WIRE_HPP_
#define PQFL_WIRE_HPP_

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "pqfl/bytes.hpp"
#include "pqfl/kem.hpp"
#include "pqfl/sig.hpp"

namespace pqfl::wire {

inline constexpr std::uint32_t kAggregatorId = 0xFFFFFFFFu;

enum class CryptoSuite : std::uint8_t { kPlaintext = 0, kRsaToy = 1, kPqc = 2 };

std::string_view suite_name(CryptoSuite suite);

enum class Phase : std::uint8_t {
  kSetup = 'S',
  kLocalTraining = 'A',
  kSubmission = 'B',
  kBroadcast = 'C',
};

bool is_known_phase(std::uint8_t tag);

struct SignedCipherUpdate {
  std::uint32_t round = 0;
  std::uint32_t client_id = 0;
  Bytes kem_ciphertext;
  Bytes payload;
  Bytes signature;

  // The bytes covered by the signature.
  Bytes signed_portion() const;
  Bytes to_bytes() const;
  static SignedCipherUpdate from_bytes(ByteView bytes);
};

// XOR with SHAKE256(tag || secret || round || client_id).
Bytes apply_keystream(const kem::SharedSecret& secret, std::uint32_t round, std::uint32_t client_id,
                      ByteView data);

struct SessionAnnouncement {
  CryptoSuite suite = CryptoSuite::kPlaintext;
  double quant_scale = 1024.0;
  std::uint32_t dim = 0;  // model parameter count (weights + bias)
  std::uint32_t n_clients = 0;
};

struct KemKeyAnnouncement {
  kem::KemPublicKey key;
};

struct RsaKeyAnnouncement {
  std::uint64_t modulus = 0;
  std::uint64_t exponent = 0;
};

struct SigKeyAnnouncement {
  sig::SigPublicKey key;
};

using Announcement = std::variant<SessionAnnouncement, KemKeyAnnouncement, RsaKeyAnnouncement, SigKeyAnnouncement>;

Bytes encode_announcement(const Announcement& a);
Announcement decode_announcement(ByteView bytes);

struct ModelBroadcast {
  std::uint32_t round = 0;
  std::vector<double> values;

  Bytes to_bytes() const;
  static ModelBroadcast from_bytes(ByteView bytes);
};

// RSA baseline payload: one u32 ciphertext block per quantized coordinate.
Bytes encode_rsa_blocks(const std::vector<std::uint64_t>& blocks);
std::vector<std::uint64_t> decode_rsa_blocks(ByteView bytes);

struct WireMessage {
  std::uint32_t sender = 0;
  Phase phase = Phase::kSetup;
  Bytes bytes;

  friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

struct PhaseTimings {
  double local_training_s = 0.0;
  double submission_s = 0.0;
  double aggregation_s = 0.0;
};

// Everything an eavesdropper on the bus sees during one round. Round 0 is
// the key-exchange setup.
struct RoundTranscript {
  std::uint32_t round = 0;
  std::vector<WireMessage> messages;
  PhaseTimings timings;
  std::uint64_t bytes_on_wire = 0;

  void post(std::uint32_t sender, Phase phase, Bytes bytes);
  std::uint64_t recount_bytes() const;
};

}  // namespace pqfl::wire

#endif  // PQFL_WIRE_HPP_
