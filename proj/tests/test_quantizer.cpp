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

#include <cmath>
#include <random>

#include "doctest.h"
#include "test_support.hpp"
#include "tdp/errors.hpp"
#include "tdp/pow2.hpp"
#include "tdp/quantizer.hpp"

using namespace tdp;

TEST_CASE("nearest element of the codebook") {
  const Pow2Codebook book{-8, -1};
  CHECK(quantize_pow2(0.3f, book) == 0.25f);
  CHECK(quantize_pow2(-0.3f, book) == -0.25f);
  CHECK(quantize_pow2(0.4f, book) == 0.5f);
  CHECK(quantize_pow2(0.9f, book) == 0.5f);  // clipped to 2^n2
  CHECK(quantize_pow2(0.0f, book) == 0.0f);
  // Ties go to the larger magnitude.
  CHECK(quantize_pow2(0.375f, book) == 0.5f);
  CHECK(quantize_pow2(std::ldexp(1.0f, -9), book) == std::ldexp(1.0f, -8));
  CHECK(quantize_pow2(std::nextafter(std::ldexp(1.0f, -9), 0.0f), book) == 0.0f);
}

TEST_CASE("codebook fit") {
  const std::vector<float> w = {0.1f, -0.6f, 0.2f};
  const Pow2Codebook book = fit_codebook(w);
  CHECK(book.n2 == -1);
  CHECK(book.n1 == -7);
  const std::vector<float> big = {3.0f};
  CHECK(fit_codebook(big).n2 == 2);
  const std::vector<float> zeros = {0.0f, 0.0f};
  CHECK(fit_codebook(zeros).levels() == kPow2Levels);
}

TEST_CASE("projection error bound") {
  std::mt19937_64 rng(8);
  std::normal_distribution<float> d(0.0f, 0.3f);
  std::vector<float> w(20000);
  for (float& v : w) v = d(rng);
  const Pow2Codebook book = fit_codebook(w);
  const double floor_err = std::ldexp(1.0, book.n1 - 1);
  for (float v : w) {
    const double err = std::fabs(v - quantize_pow2(v, book));
    // Values above 2^n2 are clipped; the fit keeps them below 1.5 * 2^n2.
    CHECK(err <= std::max(std::fabs(v) / 3.0, floor_err) + 1e-9);
  }
}

TEST_CASE("code bytes") {
  const Pow2Codebook book{-7, -1};
  CHECK(encode_pow2(0.0f, book) == kZeroCode);
  CHECK(encode_pow2(1e-6f, book) == kZeroCode);
  CHECK(encode_pow2(0.5f, book) == 0x06);
  CHECK(encode_pow2(-0.5f, book) == 0x86);
  CHECK(encode_pow2(std::ldexp(1.0f, -7), book) == 0x00);
  for (int code = 0; code < 256; ++code) {
    const auto c = static_cast<std::uint8_t>(code);
    const bool valid = c == kZeroCode || ((c & 0x78) == 0 && (c & 0x07) != 0x07);
    if (valid) {
      const float v = decode_pow2(c, book);
      CHECK(encode_pow2(v, book) == c);
    } else {
      CHECK_THROWS_AS(decode_pow2(c, book), FormatError);
    }
  }
  CHECK_THROWS_AS(encode_pow2(0.5f, Pow2Codebook{-8, -1}), ParameterError);
}

TEST_CASE("store quantization") {
  const NetworkSpec net = canonical_network();
  const WeightStore w = random_weights(net, 21, 0.3);
  const WeightStore q = quantize_store(w);
  CHECK(q.is_quantized());
  CHECK(q.payload_bytes() == 38403);
  CHECK(w.payload_bytes() == 4 * q.payload_bytes());
  CHECK(quantize_store(dequantize_store(q)) == q);

  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (!net.layers[i].is_conv()) continue;
    const ConvKernel k = q.kernel(i);
    for (float v : k.weights) {
      int e = 0;
      CHECK((v == 0.0f || std::frexp(std::fabs(v), &e) == 0.5f));
    }
  }

  const auto report = quantization_report(w, q);
  REQUIRE(report.size() == 8);
  std::size_t fb = 0, qb = 0;
  for (const auto& r : report) {
    fb += r.float_bytes;
    qb += r.quantized_bytes;
    CHECK(r.book.levels() == kPow2Levels);
  }
  CHECK(fb == 153612);
  CHECK(qb == 38403);
}

TEST_CASE("quantized inference stays a probability and zero stays one half") {
  const NetworkSpec net = canonical_network();
  std::mt19937_64 rng(5);
  const Tensor3 x = testing::random_tensor(rng, 24, 64, 1);
  const WeightStore q = quantize_store(random_weights(net, 22, 0.3));
  const float p = dequantize_infer(net, q, x);
  CHECK(p >= 0.0f);
  CHECK(p <= 1.0f);
  CHECK(p == infer_batch(net, dequantize_store(q), x));
  CHECK(dequantize_infer(net, quantize_store(zero_weights(net)), x) == 0.5f);
}
