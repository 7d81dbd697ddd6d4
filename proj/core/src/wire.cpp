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

#include "pqfl/wire.hpp"

#include <bit>

#include "pqfl/xof.hpp"

namespace pqfl::wire {
namespace {

constexpr std::string_view kTagStream = "pqfl.payload.stream";

enum : std::uint8_t {
  kKindSession = 1,
  kKindKemKey = 2,
  kKindRsaKey = 3,
  kKindSigKey = 4,
};

void put_f64(Bytes& out, double v) { put_u64le(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(ByteReader& r) { return std::bit_cast<double>(r.u64le()); }

struct Encoder {
  Bytes out;

  void operator()(const SessionAnnouncement& s) {
    out.push_back(kKindSession);
    out.push_back(static_cast<std::uint8_t>(s.suite));
    put_f64(out, s.quant_scale);
    put_u32le(out, s.dim);
    put_u32le(out, s.n_clients);
  }

  void operator()(const KemKeyAnnouncement& k) {
    const kem::KemParams& p = k.key.params;
    out.push_back(kKindKemKey);
    for (unsigned v : {p.k, p.eta1, p.eta2, p.du, p.dv}) out.push_back(static_cast<std::uint8_t>(v));
    put_u32le(out, p.ring.n);
    put_u32le(out, p.ring.q);
    put_length_prefixed(out, k.key.to_bytes());
  }

  void operator()(const RsaKeyAnnouncement& r) {
    out.push_back(kKindRsaKey);
    put_u64le(out, r.modulus);
    put_u64le(out, r.exponent);
  }

  void operator()(const SigKeyAnnouncement& s) {
    const sig::SigParams& p = s.key.params;
    out.push_back(kKindSigKey);
    for (unsigned v : {p.k, p.l, p.eta, p.tau, p.highbits_d}) out.push_back(static_cast<std::uint8_t>(v));
    put_u32le(out, p.gamma1);
    put_u32le(out, p.beta);
    put_u32le(out, p.ring.n);
    put_u32le(out, p.ring.q);
    put_length_prefixed(out, s.key.to_bytes());
  }
};

}  // namespace

std::string_view suite_name(CryptoSuite suite) {
  switch (suite) {
    case CryptoSuite::kPlaintext:
      return "plaintext";
    case CryptoSuite::kRsaToy:
      return "rsa_toy";
    case CryptoSuite::kPqc:
      return "pqc";
  }
  return "unknown";
}

bool is_known_phase(std::uint8_t tag) {
  return tag == static_cast<std::uint8_t>(Phase::kSetup) || tag == static_cast<std::uint8_t>(Phase::kLocalTraining) ||
         tag == static_cast<std::uint8_t>(Phase::kSubmission) || tag == static_cast<std::uint8_t>(Phase::kBroadcast);
}

Bytes SignedCipherUpdate::signed_portion() const {
  Bytes out;
  put_u32le(out, round);
  put_u32le(out, client_id);
  put_length_prefixed(out, kem_ciphertext);
  put_length_prefixed(out, payload);
  return out;
}

Bytes SignedCipherUpdate::to_bytes() const {
  Bytes out = signed_portion();
  put_length_prefixed(out, signature);
  return out;
}

SignedCipherUpdate SignedCipherUpdate::from_bytes(ByteView bytes) {
  ByteReader r(bytes);
  SignedCipherUpdate u;
  u.round = r.u32le();
  u.client_id = r.u32le();
  u.kem_ciphertext = r.length_prefixed();
  u.payload = r.length_prefixed();
  u.signature = r.length_prefixed();
  if (!r.done()) throw DecodeError("trailing bytes after signed update");
  return u;
}

Bytes apply_keystream(const kem::SharedSecret& secret, std::uint32_t round, std::uint32_t client_id,
                      ByteView data) {
  Xof x;
  x.absorb(kTagStream).absorb(ByteView(secret.bytes)).absorb_u32(round).absorb_u32(client_id);
  Bytes out = x.squeeze(data.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] ^= data[i];
  return out;
}

Bytes encode_announcement(const Announcement& a) {
  Encoder e;
  std::visit(e, a);
  return std::move(e.out);
}

Announcement decode_announcement(ByteView bytes) {
  ByteReader r(bytes);
  const std::uint8_t kind = r.u8();
  Announcement result;
  switch (kind) {
    case kKindSession: {
      SessionAnnouncement s;
      const std::uint8_t suite = r.u8();
      if (suite > static_cast<std::uint8_t>(CryptoSuite::kPqc)) throw DecodeError("unknown crypto suite");
      s.suite = static_cast<CryptoSuite>(suite);
      s.quant_scale = get_f64(r);
      s.dim = r.u32le();
      s.n_clients = r.u32le();
      result = s;
      break;
    }
    case kKindKemKey: {
      kem::KemParams p;
      p.k = r.u8();
      p.eta1 = r.u8();
      p.eta2 = r.u8();
      p.du = r.u8();
      p.dv = r.u8();
      p.ring.n = r.u32le();
      p.ring.q = r.u32le();
      try {
        p.validate();
      } catch (const std::invalid_argument& e) {
        throw DecodeError(std::string("invalid KEM parameters: ") + e.what());
      }
      result = KemKeyAnnouncement{kem::KemPublicKey::from_bytes(p, r.length_prefixed())};
      break;
    }
    case kKindRsaKey: {
      RsaKeyAnnouncement k;
      k.modulus = r.u64le();
      k.exponent = r.u64le();
      result = k;
      break;
    }
    case kKindSigKey: {
      sig::SigParams p;
      p.k = r.u8();
      p.l = r.u8();
      p.eta = r.u8();
      p.tau = r.u8();
      p.highbits_d = r.u8();
      p.gamma1 = r.u32le();
      p.beta = r.u32le();
      p.ring.n = r.u32le();
      p.ring.q = r.u32le();
      try {
        p.validate();
      } catch (const std::invalid_argument& e) {
        throw DecodeError(std::string("invalid signature parameters: ") + e.what());
      }
      result = SigKeyAnnouncement{sig::SigPublicKey::from_bytes(p, r.length_prefixed())};
      break;
    }
    default:
      throw DecodeError("unknown announcement kind");
  }
  if (!r.done()) throw DecodeError("trailing bytes after announcement");
  return result;
}

Bytes ModelBroadcast::to_bytes() const {
  Bytes out;
  put_u32le(out, round);
  put_u32le(out, static_cast<std::uint32_t>(values.size()));
  for (double v : values) put_f64(out, v);
  return out;
}

ModelBroadcast ModelBroadcast::from_bytes(ByteView bytes) {
  ByteReader r(bytes);
  ModelBroadcast b;
  b.round = r.u32le();
  const std::uint32_t count = r.u32le();
  if (static_cast<std::uint64_t>(count) * 8 != r.remaining()) throw DecodeError("broadcast length mismatch");
  b.values.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) b.values.push_back(get_f64(r));
  return b;
}

Bytes encode_rsa_blocks(const std::vector<std::uint64_t>& blocks) {
  Bytes out;
  out.reserve(blocks.size() * 4);
  for (std::uint64_t b : blocks) {
    if (b > 0xFFFFFFFFULL) throw std::invalid_argument("RSA block exceeds 32 bits");
    put_u32le(out, static_cast<std::uint32_t>(b));
  }
  return out;
}

std::vector<std::uint64_t> decode_rsa_blocks(ByteView bytes) {
  if (bytes.size() % 4 != 0) throw DecodeError("RSA payload length is not a multiple of 4");
  ByteReader r(bytes);
  std::vector<std::uint64_t> out;
  out.reserve(bytes.size() / 4);
  while (!r.done()) out.push_back(r.u32le());
  return out;
}

void RoundTranscript::post(std::uint32_t sender, Phase phase, Bytes bytes) {
  bytes_on_wire += bytes.size();
  messages.push_back(WireMessage{sender, phase, std::move(bytes)});
}

std::uint64_t RoundTranscript::recount_bytes() const {
  std::uint64_t total = 0;
  for (const WireMessage& m : messages) total += m.bytes.size();
  return total;
}

}  // namespace pqfl::wire
