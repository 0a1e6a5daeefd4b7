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
#include "tdp/errors.hpp"
#include "tdp/tensor.hpp"

using namespace tdp;

TEST_CASE("all-ones 3x3 kernel sums the same-padded neighbourhood") {
  Tensor3 x(3, 3, 1, std::vector<float>(9, 1.0f));
  ConvKernel k(3, 3, 1, 1);
  std::fill(k.weights.begin(), k.weights.end(), 1.0f);
  const Tensor3 y = conv2d_same(x, k, 1, 1);
  REQUIRE(y.t_len() == 3);
  REQUIRE(y.f_len() == 3);
  CHECK(y.at(1, 1, 0) == 9.0f);
  CHECK(y.at(0, 1, 0) == 6.0f);
  CHECK(y.at(1, 0, 0) == 6.0f);
  CHECK(y.at(2, 1, 0) == 6.0f);
  CHECK(y.at(1, 2, 0) == 6.0f);
  CHECK(y.at(0, 0, 0) == 4.0f);
  CHECK(y.at(2, 2, 0) == 4.0f);
}

TEST_CASE("same padding follows the ceil(len / stride) convention") {
  CHECK(same_padding(24, 3, 1).before == 1);
  CHECK(same_padding(24, 3, 1).after == 1);
  CHECK(same_padding(24, 3, 2).before == 0);
  CHECK(same_padding(24, 3, 2).after == 1);
  CHECK(same_padding(5, 3, 2).before == 1);
  CHECK(same_padding(5, 3, 2).after == 1);
  CHECK(same_padding(8, 1, 1).before == 0);
  CHECK(same_padding(8, 4, 2).before == 1);
}

TEST_CASE("strided convolution drops the trailing pad into the last output") {
  // [1 2 3 4] with a 3-tap box filter, stride 2: rows {0,1,2} and {2,3,pad}.
  Tensor3 x(4, 1, 1, {1, 2, 3, 4});
  ConvKernel k(3, 1, 1, 1);
  std::fill(k.weights.begin(), k.weights.end(), 1.0f);
  k.bias[0] = 0.5f;
  const Tensor3 y = conv2d_same(x, k, 2, 1);
  REQUIRE(y.t_len() == 2);
  CHECK(y.at(0, 0, 0) == 6.5f);
  CHECK(y.at(1, 0, 0) == 7.5f);
}

TEST_CASE("multi-channel convolution matches a direct sum") {
  std::mt19937_64 rng(1);
  std::normal_distribution<float> d(0.0f, 1.0f);
  Tensor3 x(5, 6, 3);
  for (float& v : x.data()) v = d(rng);
  ConvKernel k(3, 2, 3, 4);
  for (float& v : k.weights) v = d(rng);
  for (float& v : k.bias) v = d(rng);
  const Tensor3 y = conv2d_same(x, k, 1, 2);
  REQUIRE(y.f_len() == 3);
  const auto pt = same_padding(5, 3, 1).before;
  const auto pf = same_padding(6, 2, 2).before;
  for (int t = 0; t < y.t_len(); ++t) {
    for (int f = 0; f < y.f_len(); ++f) {
      for (int co = 0; co < 4; ++co) {
        double acc = k.bias[co];
        for (int dt = 0; dt < 3; ++dt) {
          for (int df = 0; df < 2; ++df) {
            const int it = t - pt + dt;
            const int jf = 2 * f - pf + df;
            if (it < 0 || it >= 5 || jf < 0 || jf >= 6) continue;
            for (int ci = 0; ci < 3; ++ci) acc += x.at(it, jf, ci) * k.w(dt, df, ci, co);
          }
        }
        CHECK(y.at(t, f, co) == doctest::Approx(acc).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("average pooling") {
  SUBCASE("6x1 window") {
    Tensor3 x(6, 1, 1, {0, 1, 2, 3, 4, 5});
    const Tensor3 y = avg_pool(x, 6, 1);
    REQUIRE(y.size() == 1);
    CHECK(y.at(0, 0, 0) == doctest::Approx(2.5));
  }
  SUBCASE("1x2 window") {
    Tensor3 x(2, 2, 1, {1, 3, 5, 7});
    const Tensor3 y = avg_pool(x, 1, 2);
    REQUIRE(y.t_len() == 2);
    REQUIRE(y.f_len() == 1);
    CHECK(y.at(0, 0, 0) == 2.0f);
    CHECK(y.at(1, 0, 0) == 6.0f);
  }
  SUBCASE("window must divide the extent") {
    Tensor3 x(5, 2, 1);
    CHECK_THROWS_AS(avg_pool(x, 2, 1), DimensionError);
  }
}

TEST_CASE("activations") {
  Tensor3 x(1, 4, 1, {-2.0f, -0.0f, 0.5f, 3.0f});
  const Tensor3 r = relu(x);
  CHECK(r.at(0, 0, 0) == 0.0f);
  CHECK(r.at(0, 2, 0) == 0.5f);
  CHECK(r.at(0, 3, 0) == 3.0f);
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(sigmoid(-800.0) == 0.0);
  CHECK(sigmoid(2.0) + sigmoid(-2.0) == doctest::Approx(1.0));
}

TEST_CASE("shape errors") {
  Tensor3 x(4, 4, 2);
  ConvKernel k(3, 3, 1, 1);
  CHECK_THROWS_AS(conv2d_same(x, k, 1, 1), DimensionError);
  CHECK_THROWS_AS(conv2d_same(Tensor3(), ConvKernel(1, 1, 1, 1), 1, 1), DimensionError);
  CHECK_THROWS_AS(Tensor3(-1, 2, 2), DimensionError);
  CHECK_THROWS_AS(x.rows(3, 2), DimensionError);
  ConvKernel broken(3, 3, 1, 1);
  broken.weights.pop_back();
  CHECK_THROWS_AS(broken.validate(), WeightError);
}

TEST_CASE("MAC count of a same-padded convolution") {
  ConvKernel k(3, 3, 32, 32);
  CHECK(conv_mac_count(24, 64, k, 2, 2) == 12u * 32 * 9 * 32 * 32);
}
