/* Copyright 2026 The TDP Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Power-of-two weight codebooks and the one-byte code format.
//
// A codebook with exponent range [n1, n2] represents
//   P = {0} U {+-2^k : n1 <= k <= n2}.
// Encoded layers use seven exponent levels (n1 = n2 - 6) so that sign, zero
// flag and a 3-bit exponent index fit into one byte:
//
//   bit 7    sign (1 = negative)
//   bit 6    zero flag; the only valid zero code is 0x40
//   bits 5-3 reserved, must be 0
//   bits 2-0 exponent index e, value = 2^(n1 + e), e in [0, 6]
//
// Index 7, reserved bits, or a zero flag combined with other bits mark a
// corrupt code.

#ifndef TDP_POW2_HPP_
#define TDP_POW2_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "tdp/tensor.hpp"

namespace tdp {

struct Pow2Codebook {
  int n1 = -6;  // smallest exponent
  int n2 = 0;   // largest exponent

  int levels() const { return n2 - n1 + 1; }
  bool operator==(const Pow2Codebook&) const = default;
};

inline constexpr int kPow2Levels = 7;
inline constexpr std::uint8_t kZeroCode = 0x40;

// n2 = floor(log2(4 * max_abs / 3)), n1 = n2 - 6. A zero max_abs yields the
// default book; every value then encodes as zero.
Pow2Codebook fit_codebook(std::span<const float> values);

// Nearest element of the book's set; ties go to the larger magnitude.
float quantize_pow2(float w, const Pow2Codebook& book);

// Code byte for quantize_pow2(w, book). The book must have kPow2Levels levels.
std::uint8_t encode_pow2(float w, const Pow2Codebook& book);

// Throws FormatError on a corrupt code.
float decode_pow2(std::uint8_t code, const Pow2Codebook& book);

// One code per weight followed by one per bias, sharing a single codebook.
struct QuantizedKernel {
  int kt = 1;
  int kf = 1;
  int c_in = 1;
  int c_out = 1;
  Pow2Codebook book;
  std::vector<std::uint8_t> codes;

  std::size_t parameter_count() const {
    return static_cast<std::size_t>(kt) * kf * c_in * c_out + c_out;
  }
  bool operator==(const QuantizedKernel&) const = default;
};

QuantizedKernel quantize_kernel(const ConvKernel& kernel);
ConvKernel decode_kernel(const QuantizedKernel& q);

}  // namespace tdp

#endif  // TDP_POW2_HPP_
