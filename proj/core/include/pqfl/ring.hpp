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

// Arithmetic in R_q = Z_q[X]/(X^n + 1).
//
// Multiplication goes through a negacyclic number-theoretic transform. When
// 2n divides q-1 the transform is complete (n linear factors). When only n
// divides q-1 (the q = 3329, n = 256 case) the transform stops one level
// early and the NTT domain holds n/2 residues modulo quadratics X^2 - gamma_i;
// pointwise products are then degree-one base multiplications.

#ifndef PQFL_RING_HPP_
#define PQFL_RING_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pqfl/bytes.hpp"

namespace pqfl::ring {

class RingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RingParams {
  std::uint32_t n = 256;
  std::uint32_t q = 3329;

  // Throws RingError unless n is a power of two >= 2, q is an odd prime
  // below 2^31, and q = 1 (mod n).
  void validate() const;

  friend bool operator==(const RingParams&, const RingParams&) = default;
};

inline constexpr RingParams kKemRing{256, 3329};
inline constexpr RingParams kSigRing{256, 8380417};
inline constexpr RingParams kToyRing{4, 17};

struct CoeffDomain {};
struct NttDomain {};

// A ring element with coefficients in [0, q). The Domain tag keeps
// coefficient-form and NTT-form values from being mixed up.
template <class Domain>
class BasicPoly {
 public:
  explicit BasicPoly(RingParams params) : params_(params), coeffs_(params.n, 0) {}

  BasicPoly(RingParams params, std::vector<std::uint32_t> coeffs)
      : params_(params), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != params_.n) throw RingError("polynomial length must equal n");
    for (std::uint32_t c : coeffs_) {
      if (c >= params_.q) throw RingError("coefficient outside [0, q)");
    }
  }

  // Reduces arbitrary signed integers into [0, q).
  static BasicPoly from_signed(RingParams params, std::span<const std::int64_t> values) {
    if (values.size() != params.n) throw RingError("polynomial length must equal n");
    BasicPoly p(params);
    const auto q = static_cast<std::int64_t>(params.q);
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::int64_t r = values[i] % q;
      p.coeffs_[i] = static_cast<std::uint32_t>(r < 0 ? r + q : r);
    }
    return p;
  }

  const RingParams& params() const { return params_; }
  std::size_t size() const { return coeffs_.size(); }
  std::uint32_t operator[](std::size_t i) const { return coeffs_[i]; }
  std::span<const std::uint32_t> coeffs() const { return coeffs_; }

  // Writable access for kernels in this module. Callers must keep every
  // value in [0, q).
  std::span<std::uint32_t> mutable_coeffs() { return coeffs_; }

  // Stores value mod q.
  void set(std::size_t i, std::int64_t value) {
    const auto q = static_cast<std::int64_t>(params_.q);
    std::int64_t r = value % q;
    coeffs_.at(i) = static_cast<std::uint32_t>(r < 0 ? r + q : r);
  }

  bool is_zero() const {
    for (std::uint32_t c : coeffs_) {
      if (c != 0) return false;
    }
    return true;
  }

  friend bool operator==(const BasicPoly&, const BasicPoly&) = default;

 private:
  RingParams params_;
  std::vector<std::uint32_t> coeffs_;
};

using Poly = BasicPoly<CoeffDomain>;
using NttPoly = BasicPoly<NttDomain>;
using PolyVec = std::vector<Poly>;
using NttVec = std::vector<NttPoly>;

// Dense rows x cols matrix of ring elements, row-major.
template <class P>
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols, std::vector<P> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows * cols) throw RingError("matrix entry count mismatch");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const P& at(std::size_t r, std::size_t c) const { return entries_.at(r * cols_ + c); }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<P> entries_;
};

using PolyMat = Matrix<Poly>;
using NttMat = Matrix<NttPoly>;

// Centered representative of v mod q in (-q/2, q/2].
inline std::int64_t centered(std::uint32_t v, std::uint32_t q) {
  return v > q / 2 ? static_cast<std::int64_t>(v) - q : static_cast<std::int64_t>(v);
}

// Max |centered coefficient| over a polynomial or a vector of them.
std::uint32_t inf_norm(const Poly& p);
std::uint32_t inf_norm(const PolyVec& v);

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_sub(const Poly& a, const Poly& b);
Poly poly_mul_negacyclic(const Poly& a, const Poly& b);

NttPoly ntt_forward(const Poly& a);
Poly ntt_inverse(const NttPoly& a_hat);
NttPoly ntt_add(const NttPoly& a, const NttPoly& b);
NttPoly ntt_pointwise(const NttPoly& a, const NttPoly& b);

PolyVec polyvec_add(const PolyVec& a, const PolyVec& b);
PolyVec polyvec_sub(const PolyVec& a, const PolyVec& b);
NttVec ntt_forward(const PolyVec& v);
PolyVec ntt_inverse(const NttVec& v);
// sum_i a[i] * b[i] in the NTT domain.
NttPoly ntt_dot(const NttVec& a, const NttVec& b);
// M * v, or M^T * v when transpose is set.
NttVec ntt_mat_vec(const NttMat& m, const NttVec& v, bool transpose = false);

// Uniform element of R_q expanded from (seed, nonce) by rejection sampling
// on a SHAKE128 stream.
Poly sample_uniform(RingParams params, const Seed32& seed, std::uint16_t nonce);

// Centered binomial sample with parameter eta in {2, 3}; coefficients in
// [-eta, eta] stored mod q. Expanded from SHAKE256(seed || nonce).
Poly sample_cbd(RingParams params, const Seed32& seed, std::uint16_t nonce, unsigned eta);

// 16-bit little-endian per coefficient when q <= 2^16, 32-bit otherwise.
std::size_t coeff_width_bytes(RingParams params);
Bytes poly_to_bytes(const Poly& p);
Poly poly_from_bytes(RingParams params, ByteView bytes);

}  // namespace pqfl::ring

#endif  // PQFL_RING_HPP_
