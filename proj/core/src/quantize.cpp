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

#include "pqfl/quantize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pqfl::quant {

Quantizer::Quantizer(double scale) : scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("quantization scale must be positive");
}

std::int16_t Quantizer::quantize(double x) const {
  constexpr double lo = std::numeric_limits<std::int16_t>::min();
  constexpr double hi = std::numeric_limits<std::int16_t>::max();
  if (std::isnan(x)) return 0;
  const double r = std::nearbyint(x * scale_);
  if (r <= lo) return std::numeric_limits<std::int16_t>::min();
  if (r >= hi) return std::numeric_limits<std::int16_t>::max();
  return static_cast<std::int16_t>(r);
}

std::vector<std::int16_t> Quantizer::quantize(std::span<const double> xs) const {
  std::vector<std::int16_t> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(quantize(x));
  return out;
}

Bytes Quantizer::encode(std::span<const double> xs) const {
  Bytes out;
  out.reserve(xs.size() * 2);
  for (double x : xs) put_u16le(out, static_cast<std::uint16_t>(quantize(x)));
  return out;
}

std::vector<double> Quantizer::decode(ByteView bytes) const {
  if (bytes.size() % 2 != 0) throw DecodeError("quantized payload has odd length");
  ByteReader r(bytes);
  std::vector<double> out;
  out.reserve(bytes.size() / 2);
  while (!r.done()) out.push_back(dequantize(static_cast<std::int16_t>(r.u16le())));
  return out;
}

}  // namespace pqfl::quant
