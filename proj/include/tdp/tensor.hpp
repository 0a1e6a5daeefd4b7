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

// Dense rank-3 tensors in (time, frequency, channel) row-major order and the
// handful of kernels the classifier needs. Everything here is a pure function
// of its inputs and is shared by the batch and streaming executors.

#ifndef TDP_TENSOR_HPP_
#define TDP_TENSOR_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace tdp {

#ifdef TDP_WIDE_ACCUMULATOR
using Accumulator = double;
#else
using Accumulator = float;
#endif

// Non-owning read-only view over (t, f, c) data.
struct TensorView {
  const float* data = nullptr;
  int t_len = 0;
  int f_len = 0;
  int c_len = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(t_len) * f_len * c_len;
  }
  float at(int t, int f, int c) const {
    return data[(static_cast<std::size_t>(t) * f_len + f) * c_len + c];
  }
};

class Tensor3 {
 public:
  Tensor3() = default;
  // Zero-filled tensor. Negative extents throw DimensionError.
  Tensor3(int t_len, int f_len, int c_len);
  Tensor3(int t_len, int f_len, int c_len, std::vector<float> data);

  int t_len() const { return t_len_; }
  int f_len() const { return f_len_; }
  int c_len() const { return c_len_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float& at(int t, int f, int c) { return data_[index(t, f, c)]; }
  float at(int t, int f, int c) const { return data_[index(t, f, c)]; }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  TensorView view() const { return {data_.data(), t_len_, f_len_, c_len_}; }

  // Copy of rows [first, first + count).
  Tensor3 rows(int first, int count) const;

  bool operator==(const Tensor3&) const = default;

 private:
  std::size_t index(int t, int f, int c) const {
    return (static_cast<std::size_t>(t) * f_len_ + f) * c_len_ + c;
  }

  int t_len_ = 0;
  int f_len_ = 0;
  int c_len_ = 0;
  std::vector<float> data_;
};

// Weights indexed (kt, kf, c_in, c_out), bias indexed c_out.
struct ConvKernel {
  int kt = 1;
  int kf = 1;
  int c_in = 1;
  int c_out = 1;
  std::vector<float> weights;
  std::vector<float> bias;

  ConvKernel() = default;
  // Zero weights and bias of the given shape.
  ConvKernel(int kt, int kf, int c_in, int c_out);

  std::size_t weight_count() const {
    return static_cast<std::size_t>(kt) * kf * c_in * c_out;
  }
  std::size_t parameter_count() const { return weight_count() + c_out; }

  float& w(int dt, int df, int ci, int co) {
    return weights[((static_cast<std::size_t>(dt) * kf + df) * c_in + ci) * c_out + co];
  }
  float w(int dt, int df, int ci, int co) const {
    return weights[((static_cast<std::size_t>(dt) * kf + df) * c_in + ci) * c_out + co];
  }

  // Throws WeightError when the buffers disagree with the declared shape.
  void validate() const;

  bool operator==(const ConvKernel&) const = default;
};

// Zero padding that makes a strided convolution produce ceil(len / stride)
// outputs. An odd total puts the extra zero on the trailing edge.
struct SamePadding {
  int before = 0;
  int after = 0;
};
SamePadding same_padding(int in_len, int kernel, int stride);

inline int ceil_div(int a, int b) { return (a + b - 1) / b; }

// Core convolution: writes `out_rows` output rows where output row j reads
// input rows first_row + j * stride_t + dt for dt in [0, kernel.kt). Rows
// outside [0, in.t_len) read as zero. The frequency axis uses same padding.
// `out` must hold out_rows * ceil(in.f_len / stride_f) * kernel.c_out values.
void conv2d_rows(const TensorView& in, const ConvKernel& kernel, int first_row,
                 int stride_t, int stride_f, int out_rows, std::span<float> out);

// Linear convolution plus bias with same padding on both axes.
Tensor3 conv2d_same(const Tensor3& input, const ConvKernel& kernel,
                    int stride_t, int stride_f);

Tensor3 relu(Tensor3 input);
void relu_inplace(std::span<float> values);

double sigmoid(double x);

// Non-overlapping mean over window_t x window_f blocks, per channel.
Tensor3 avg_pool(const Tensor3& input, int window_t, int window_f);

// MACs performed by conv2d_same for an input of the given extent.
std::size_t conv_mac_count(int t_len, int f_len, const ConvKernel& kernel,
                           int stride_t, int stride_f);

}  // namespace tdp

#endif  // TDP_TENSOR_HPP_
