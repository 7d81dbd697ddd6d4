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

#include <algorithm>
#include <iterator>
#include <istream>
#include <ostream>

#include "pqfl/io.hpp"

namespace pqfl::io {

Bytes encode_transcripts(std::span<const wire::RoundTranscript> transcripts, const Seed32& config_hash) {
  std::size_t size = kTranscriptMagic.size() + config_hash.size() + 4;
  for (const wire::RoundTranscript& t : transcripts) {
    size += 8;
    for (const wire::WireMessage& m : t.messages) size += 9 + m.bytes.size();
  }
  Bytes out;
  out.reserve(size);
  append(out, kTranscriptMagic);
  append(out, config_hash);
  put_u32le(out, static_cast<std::uint32_t>(transcripts.size()));
  for (const wire::RoundTranscript& t : transcripts) {
    put_u32le(out, t.round);
    put_u32le(out, static_cast<std::uint32_t>(t.messages.size()));
    for (const wire::WireMessage& m : t.messages) {
      out.push_back(static_cast<std::uint8_t>(m.phase));
      put_u32le(out, m.sender);
      put_length_prefixed(out, m.bytes);
    }
  }
  return out;
}

void dump_transcripts(std::span<const wire::RoundTranscript> transcripts, const Seed32& config_hash,
                      std::ostream& out) {
  const Bytes bytes = encode_transcripts(transcripts, config_hash);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed to write transcript");
}

LoadedTranscripts decode_transcripts(ByteView bytes, const LoadOptions& options) {
  ByteReader r(bytes);
  LoadedTranscripts loaded;
  try {
    const ByteView magic = r.take(kTranscriptMagic.size());
    if (!std::equal(magic.begin(), magic.end(), kTranscriptMagic.begin())) throw IoError("bad magic");
    const ByteView hash = r.take(32);
    std::copy(hash.begin(), hash.end(), loaded.config_hash.begin());
  } catch (const DecodeError&) {
    throw IoError("bad magic");
  }

  std::uint32_t n_transcripts = 0;
  try {
    n_transcripts = r.u32le();
  } catch (const DecodeError&) {
    throw IoError("truncated header");
  }

  std::size_t record = 0;
  for (std::uint32_t i = 0; i < n_transcripts; ++i) {
    wire::RoundTranscript t;
    std::uint32_t n_messages = 0;
    try {
      t.round = r.u32le();
      n_messages = r.u32le();
    } catch (const DecodeError&) {
      throw IoError("truncated transcript header before record " + std::to_string(record));
    }
    for (std::uint32_t j = 0; j < n_messages; ++j, ++record) {
      try {
        const std::uint8_t phase = r.u8();
        if (!wire::is_known_phase(phase)) {
          throw IoError("record " + std::to_string(record) + ": unknown phase tag " + std::to_string(phase));
        }
        const std::uint32_t sender = r.u32le();
        t.post(sender, static_cast<wire::Phase>(phase), r.length_prefixed());
      } catch (const DecodeError&) {
        throw IoError("truncated record " + std::to_string(record));
      }
    }
    loaded.transcripts.push_back(std::move(t));
  }
  if (!r.done()) throw IoError("trailing bytes after record " + std::to_string(record));

  if (options.expected_hash && *options.expected_hash != loaded.config_hash) {
    const std::string msg = "transcript config hash " + to_hex(loaded.config_hash) +
                            " does not match the declared scenario " + to_hex(*options.expected_hash);
    if (options.strict) throw IoError(msg);
    loaded.warnings.push_back(msg);
  }
  return loaded;
}

LoadedTranscripts load_transcripts(std::istream& in, const LoadOptions& options) {
  const Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_transcripts(bytes, options);
}

void describe_transcripts(std::span<const wire::RoundTranscript> transcripts, std::ostream& out) {
  for (const wire::RoundTranscript& t : transcripts) {
    out << "round " << t.round << ": " << t.messages.size() << " messages, " << t.bytes_on_wire << " bytes\n";
    for (const wire::WireMessage& m : t.messages) {
      out << "  [" << static_cast<char>(m.phase) << "] ";
      if (m.sender == wire::kAggregatorId) {
        out << "aggregator";
      } else {
        out << "client " << m.sender;
      }
      out << "  " << m.bytes.size() << " B  ";
      try {
        switch (m.phase) {
          case wire::Phase::kSetup: {
            const wire::Announcement a = wire::decode_announcement(m.bytes);
            if (const auto* s = std::get_if<wire::SessionAnnouncement>(&a)) {
              out << "session suite=" << wire::suite_name(s->suite) << " dim=" << s->dim
                  << " clients=" << s->n_clients;
            } else if (std::holds_alternative<wire::KemKeyAnnouncement>(a)) {
              out << "KEM public key";
            } else if (const auto* k = std::get_if<wire::RsaKeyAnnouncement>(&a)) {
              out << "RSA public key n=" << k->modulus << " e=" << k->exponent;
            } else {
              out << "signature verification key";
            }
            break;
          }
          case wire::Phase::kSubmission: {
            const auto s = wire::SignedCipherUpdate::from_bytes(m.bytes);
            out << "update round=" << s.round << " client=" << s.client_id << " kem_ct=" << s.kem_ciphertext.size()
                << " payload=" << s.payload.size() << " sig=" << s.signature.size();
            break;
          }
          case wire::Phase::kBroadcast: {
            const auto b = wire::ModelBroadcast::from_bytes(m.bytes);
            out << "model broadcast round=" << b.round << " values=" << b.values.size();
            break;
          }
          case wire::Phase::kLocalTraining:
            out << "local";
            break;
        }
      } catch (const DecodeError&) {
        out << "undecodable";
      }
      out << '\n';
    }
  }
}

}  // namespace pqfl::io
