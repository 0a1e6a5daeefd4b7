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

#include "tdp/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tdp/errors.hpp"

namespace tdp {

Tensor3::Tensor3(int t_len, int f_len, int c_len)
    : t_len_(t_len), f_len_(f_len), c_len_(c_len) {
  if (t_len < 0 || f_len < 0 || c_len < 0) {
    throw DimensionError("negative tensor extent");
  }
  data_.assign(static_cast<std::size_t>(t_len) * f_len * c_len, 0.0f);
}

Tensor3::Tensor3(int t_len, int f_len, int c_len, std::vector<float> data)
    : t_len_(t_len), f_len_(f_len), c_len_(c_len), data_(std::move(data)) {
  if (t_len < 0 || f_len < 0 || c_len < 0) {
    throw DimensionError("negative tensor extent");
  }
  if (data_.size() != static_cast<std::size_t>(t_len) * f_len * c_len) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(t_len) + "x" +
                         std::to_string(f_len) + "x" + std::to_string(c_len));
  }
}

Tensor3 Tensor3::rows(int first, int count) const {
  if (first < 0 || count < 0 || first + count > t_len_) {
    throw DimensionError("row range out of bounds");
  }
  const std::size_t stride = static_cast<std::size_t>(f_len_) * c_len_;
  std::vector<float> out(data_.begin() + first * stride,
                         data_.begin() + (first + count) * stride);
  return Tensor3(count, f_len_, c_len_, std::move(out));
}

ConvKernel::ConvKernel(int kt_, int kf_, int c_in_, int c_out_)
    : kt(kt_), kf(kf_), c_in(c_in_), c_out(c_out_) {
  if (kt < 1 || kf < 1 || c_in < 1 || c_out < 1) {
    throw DimensionError("kernel extents must be positive");
  }
  weights.assign(weight_count(), 0.0f);
  bias.assign(static_cast<std::size_t>(c_out), 0.0f);
}

void ConvKernel::validate() const {
  if (kt < 1 || kf < 1 || c_in < 1 || c_out < 1) {
    throw WeightError("kernel extents must be positive");
  }
  if (weights.size() != weight_count() ||
      bias.size() != static_cast<std::size_t>(c_out)) {
    throw WeightError("kernel buffers do not match declared shape");
  }
}

SamePadding same_padding(int in_len, int kernel, int stride) {
  const int out_len = ceil_div(in_len, stride);
  const int total = std::max((out_len - 1) * stride + kernel - in_len, 0);
  return {total / 2, total - total / 2};
}

void conv2d_rows(const TensorView& in, const ConvKernel& kernel, int first_row,
                 int stride_t, int stride_f, int out_rows, std::span<float> out) {
  const int out_f = ceil_div(in.f_len, stride_f);
  const int pad_f = same_padding(in.f_len, kernel.kf, stride_f).before;
  const int c_in = kernel.c_in;
  const int c_out = kernel.c_out;
  if (out.size() < static_cast<std::size_t>(out_rows) * out_f * c_out) {
    throw DimensionError("conv output buffer too small");
  }

  std::vector<Accumulator> acc(static_cast<std::size_t>(c_out));
  for (int ot = 0; ot < out_rows; ++ot) {
    const int row0 = first_row + ot * stride_t;
    for (int of = 0; of < out_f; ++of) {
      const int col0 = of * stride_f - pad_f;
      for (int co = 0; co < c_out; ++co) acc[co] = kernel.bias[co];

      for (int dt = 0; dt < kernel.kt; ++dt) {
        const int t = row0 + dt;
        if (t < 0 || t >= in.t_len) continue;
        for (int df = 0; df < kernel.kf; ++df) {
          const int f = col0 + df;
          if (f < 0 || f >= in.f_len) continue;
          const float* x = in.data + (static_cast<std::size_t>(t) * in.f_len + f) * c_in;
          const float* w = kernel.weights.data() +
                           (static_cast<std::size_t>(dt) * kernel.kf + df) * c_in * c_out;
          for (int ci = 0; ci < c_in; ++ci) {
            const Accumulator xv = x[ci];
            const float* wrow = w + static_cast<std::size_t>(ci) * c_out;
            for (int co = 0; co < c_out; ++co) acc[co] += xv * wrow[co];
          }
        }
      }

      float* dst = out.data() + (static_cast<std::size_t>(ot) * out_f + of) * c_out;
      for (int co = 0; co < c_out; ++co) dst[co] = static_cast<float>(acc[co]);
    }
  }
}

Tensor3 conv2d_same(const Tensor3& input, const ConvKernel& kernel,
                    int stride_t, int stride_f) {
  kernel.validate();
  if (input.empty()) throw DimensionError("conv2d on empty input");
  if (input.c_len() != kernel.c_in) {
    throw DimensionError("conv2d channel mismatch: input has " +
                         std::to_string(input.c_len()) + ", kernel expects " +
                         std::to_string(kernel.c_in));
  }
  if (stride_t < 1 || stride_f < 1) throw DimensionError("conv2d stride must be >= 1");

  const int out_t = ceil_div(input.t_len(), stride_t);
  const int out_f = ceil_div(input.f_len(), stride_f);
  Tensor3 out(out_t, out_f, kernel.c_out);
  const int pad_t = same_padding(input.t_len(), kernel.kt, stride_t).before;
  conv2d_rows(input.view(), kernel, -pad_t, stride_t, stride_f, out_t, out.data());
  return out;
}

void relu_inplace(std::span<float> values) {
  for (float& v : values) v = std::max(v, 0.0f);
}

Tensor3 relu(Tensor3 input) {
  relu_inplace(input.data());
  return input;
}

double sigmoid(double x) {
  // Split on sign so exp never overflows.
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor3 avg_pool(const Tensor3& input, int window_t, int window_f) {
  if (window_t < 1 || window_f < 1) throw DimensionError("pool window must be positive");
  if (input.t_len() % window_t != 0 || input.f_len() % window_f != 0) {
    throw DimensionError("pool window " + std::to_string(window_t) + "x" +
                         std::to_string(window_f) + " does not divide input " +
                         std::to_string(input.t_len()) + "x" +
                         std::to_string(input.f_len()));
  }
  const int out_t = input.t_len() / window_t;
  const int out_f = input.f_len() / window_f;
  const int c_len = input.c_len();
  Tensor3 out(out_t, out_f, c_len);
  const Accumulator scale = Accumulator(1) / (window_t * window_f);
  std::vector<Accumulator> acc(static_cast<std::size_t>(c_len));
  for (int ot = 0; ot < out_t; ++ot) {
    for (int of = 0; of < out_f; ++of) {
      std::fill(acc.begin(), acc.end(), Accumulator(0));
      for (int dt = 0; dt < window_t; ++dt) {
        for (int df = 0; df < window_f; ++df) {
          for (int c = 0; c < c_len; ++c) {
            acc[c] += input.at(ot * window_t + dt, of * window_f + df, c);
          }
        }
      }
      for (int c = 0; c < c_len; ++c) out.at(ot, of, c) = static_cast<float>(acc[c] * scale);
    }
  }
  return out;
}

std::size_t conv_mac_count(int t_len, int f_len, const ConvKernel& kernel,
                           int stride_t, int stride_f) {
  // Padding taps are counted; the kernel loop skips them but the count is
  // meant as a fixed workload figure.
  return static_cast<std::size_t>(ceil_div(t_len, stride_t)) *
         ceil_div(f_len, stride_f) * kernel.weight_count();
}

}  // namespace tdp
