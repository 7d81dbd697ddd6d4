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

#include "pqfl/xof.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <memory>
#include <stdexcept>

namespace pqfl {
namespace {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

const EVP_MD* digest_for(XofKind kind) {
  return kind == XofKind::kShake128 ? EVP_shake128() : EVP_shake256();
}

void run_xof(XofKind kind, ByteView input, std::span<std::uint8_t> out) {
  MdCtx ctx(EVP_MD_CTX_new());
  if (!ctx || EVP_DigestInit_ex(ctx.get(), digest_for(kind), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), input.data(), input.size()) != 1 ||
      EVP_DigestFinalXOF(ctx.get(), out.data(), out.size()) != 1) {
    throw std::runtime_error("OpenSSL SHAKE evaluation failed");
  }
}

// One rate-sized block of the relevant sponge.
std::size_t block_size(XofKind kind) { return kind == XofKind::kShake128 ? 168 : 136; }

}  // namespace

Xof& Xof::absorb(ByteView data) {
  if (squeezing_) throw std::logic_error("Xof: absorb after squeeze");
  append(input_, data);
  return *this;
}

Xof& Xof::absorb(std::string_view text) {
  if (squeezing_) throw std::logic_error("Xof: absorb after squeeze");
  append(input_, text);
  return *this;
}

Xof& Xof::absorb_u8(std::uint8_t v) {
  std::uint8_t b[1] = {v};
  return absorb(ByteView(b, 1));
}

Xof& Xof::absorb_u16(std::uint16_t v) {
  Bytes b;
  put_u16le(b, v);
  return absorb(b);
}

Xof& Xof::absorb_u32(std::uint32_t v) {
  Bytes b;
  put_u32le(b, v);
  return absorb(b);
}

Xof& Xof::absorb_u64(std::uint64_t v) {
  Bytes b;
  put_u64le(b, v);
  return absorb(b);
}

// SHAKE output of length L is a prefix of the output of any length > L, so
// the stream is extended by re-evaluating at a larger length. OpenSSL 3.0
// has no incremental squeeze.
void Xof::refill(std::size_t min_total) {
  std::size_t target = std::max(output_.size() * 2, 4 * block_size(kind_));
  target = std::max(target, min_total);
  output_.resize(target);
  run_xof(kind_, input_, output_);
}

void Xof::squeeze(std::span<std::uint8_t> out) {
  squeezing_ = true;
  if (pos_ + out.size() > output_.size()) refill(pos_ + out.size());
  std::copy_n(output_.begin() + static_cast<std::ptrdiff_t>(pos_), out.size(), out.begin());
  pos_ += out.size();
}

Bytes Xof::squeeze(std::size_t n) {
  Bytes out(n);
  squeeze(std::span<std::uint8_t>(out));
  return out;
}

Seed32 Xof::squeeze32() {
  Seed32 out{};
  squeeze(std::span<std::uint8_t>(out));
  return out;
}

std::uint8_t Xof::next_byte() {
  squeezing_ = true;
  if (pos_ >= output_.size()) refill(pos_ + 1);
  return output_[pos_++];
}

Bytes shake256(ByteView input, std::size_t out_len) {
  Bytes out(out_len);
  run_xof(XofKind::kShake256, input, out);
  return out;
}

Seed32 sha3_256(ByteView input) {
  Seed32 out{};
  MdCtx ctx(EVP_MD_CTX_new());
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha3_256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), input.data(), input.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size()) {
    throw std::runtime_error("OpenSSL SHA3-256 evaluation failed");
  }
  return out;
}

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

}  // namespace pqfl
