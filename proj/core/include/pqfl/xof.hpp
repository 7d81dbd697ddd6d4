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

// SHAKE extendable-output hashing and SHA3-256, backed by OpenSSL.

#ifndef PQFL_XOF_HPP_
#define PQFL_XOF_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "pqfl/bytes.hpp"

namespace pqfl {

enum class XofKind { kShake128, kShake256 };

// Absorb-then-squeeze stream. Squeezing may be repeated; successive calls
// continue the same output stream. Absorbing after the first squeeze is a
// logic error.
class Xof {
 public:
  explicit Xof(XofKind kind = XofKind::kShake256) : kind_(kind) {}

  Xof& absorb(ByteView data);
  Xof& absorb(std::string_view text);
  Xof& absorb_u8(std::uint8_t v);
  Xof& absorb_u16(std::uint16_t v);
  Xof& absorb_u32(std::uint32_t v);
  Xof& absorb_u64(std::uint64_t v);

  void squeeze(std::span<std::uint8_t> out);
  Bytes squeeze(std::size_t n);
  Seed32 squeeze32();
  std::uint8_t next_byte();

 private:
  void refill(std::size_t min_total);

  XofKind kind_;
  Bytes input_;
  Bytes output_;
  std::size_t pos_ = 0;
  bool squeezing_ = false;
};

Bytes shake256(ByteView input, std::size_t out_len);
Seed32 sha3_256(ByteView input);

}  // namespace pqfl

#endif  // PQFL_XOF_HPP_
