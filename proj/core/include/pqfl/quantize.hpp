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

#ifndef PQFL_QUANTIZE_HPP_
#define PQFL_QUANTIZE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "pqfl/bytes.hpp"

namespace pqfl::quant {

inline constexpr double kDefaultScale = 1024.0;  // 2^10 units per 1.0

// Signed 16-bit fixed point, saturating at the int16 range.
class Quantizer {
 public:
  explicit Quantizer(double scale = kDefaultScale);

  double scale() const { return scale_; }
  double step() const { return 1.0 / scale_; }

  std::int16_t quantize(double x) const;
  double dequantize(std::int16_t v) const { return static_cast<double>(v) / scale_; }

  std::vector<std::int16_t> quantize(std::span<const double> xs) const;
  // int16 little-endian per coordinate.
  Bytes encode(std::span<const double> xs) const;
  std::vector<double> decode(ByteView bytes) const;

 private:
  double scale_;
};

}  // namespace pqfl::quant

#endif  // PQFL_QUANTIZE_HPP_
