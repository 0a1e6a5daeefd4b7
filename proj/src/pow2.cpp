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

#include "tdp/pow2.hpp"

#include <cmath>
#include <string>

#include "tdp/errors.hpp"

namespace tdp {

namespace {

// Exponent index in [0, levels) of the nearest nonzero level, or -1 when zero
// is nearest. Works on |w| only.
int nearest_level(float magnitude, const Pow2Codebook& book) {
  const double a = magnitude;
  const double smallest = std::ldexp(1.0, book.n1);
  // Midpoint between 0 and 2^n1.
  if (a < 0.5 * smallest) return -1;
  if (a >= std::ldexp(1.0, book.n2)) return book.n2 - book.n1;

  // a lies in [2^n1 / 2, 2^n2). Between 2^k and 2^(k+1) the midpoint is
  // 1.5 * 2^k; ties round up.
  int k = std::ilogb(a);  // 2^k <= a < 2^(k+1)
  if (k < book.n1) return 0;
  if (a >= 1.5 * std::ldexp(1.0, k)) ++k;
  if (k > book.n2) k = book.n2;
  return k - book.n1;
}

}  // namespace

Pow2Codebook fit_codebook(std::span<const float> values) {
  double max_abs = 0.0;
  for (float v : values) max_abs = std::max(max_abs, static_cast<double>(std::fabs(v)));
  Pow2Codebook book;
  if (max_abs == 0.0) return book;
  book.n2 = static_cast<int>(std::floor(std::log2(4.0 * max_abs / 3.0)));
  book.n1 = book.n2 - (kPow2Levels - 1);
  return book;
}

float quantize_pow2(float w, const Pow2Codebook& book) {
  if (book.n1 > book.n2) throw ParameterError("codebook with n1 > n2");
  if (w == 0.0f) return 0.0f;
  const int level = nearest_level(std::fabs(w), book);
  if (level < 0) return 0.0f;
  const float mag = static_cast<float>(std::ldexp(1.0, book.n1 + level));
  return w < 0 ? -mag : mag;
}

std::uint8_t encode_pow2(float w, const Pow2Codebook& book) {
  if (book.levels() != kPow2Levels) {
    throw ParameterError("encodable codebooks have exactly 7 levels, got " +
                         std::to_string(book.levels()));
  }
  if (w == 0.0f) return kZeroCode;
  const int level = nearest_level(std::fabs(w), book);
  if (level < 0) return kZeroCode;
  const std::uint8_t sign = w < 0 ? 0x80 : 0x00;
  return static_cast<std::uint8_t>(sign | static_cast<std::uint8_t>(level));
}

float decode_pow2(std::uint8_t code, const Pow2Codebook& book) {
  if (code == kZeroCode) return 0.0f;
  if ((code & 0x78) != 0 || (code & 0x07) == 0x07) {
    throw FormatError("corrupt power-of-two code byte " + std::to_string(code));
  }
  const float mag = static_cast<float>(std::ldexp(1.0, book.n1 + (code & 0x07)));
  return (code & 0x80) ? -mag : mag;
}

QuantizedKernel quantize_kernel(const ConvKernel& kernel) {
  kernel.validate();
  QuantizedKernel q;
  q.kt = kernel.kt;
  q.kf = kernel.kf;
  q.c_in = kernel.c_in;
  q.c_out = kernel.c_out;

  std::vector<float> all(kernel.weights);
  all.insert(all.end(), kernel.bias.begin(), kernel.bias.end());
  for (float v : all) {
    if (!std::isfinite(v)) throw DomainError("cannot quantize non-finite weight");
  }
  q.book = fit_codebook(all);
  q.codes.reserve(all.size());
  for (float v : all) q.codes.push_back(encode_pow2(v, q.book));
  return q;
}

ConvKernel decode_kernel(const QuantizedKernel& q) {
  ConvKernel k(q.kt, q.kf, q.c_in, q.c_out);
  if (q.codes.size() != k.parameter_count()) {
    throw FormatError("quantized payload has " + std::to_string(q.codes.size()) +
                      " codes, expected " + std::to_string(k.parameter_count()));
  }
  const std::size_t nw = k.weight_count();
  for (std::size_t i = 0; i < nw; ++i) k.weights[i] = decode_pow2(q.codes[i], q.book);
  for (int c = 0; c < q.c_out; ++c) k.bias[c] = decode_pow2(q.codes[nw + c], q.book);
  return k;
}

}  // namespace tdp
