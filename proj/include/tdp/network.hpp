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

// Sequential network description, weight storage and the layer-by-layer
// (batch) executor. The batch executor is the reference the streaming engine
// is checked against.

#ifndef TDP_NETWORK_HPP_
#define TDP_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tdp/pow2.hpp"
#include "tdp/tensor.hpp"

namespace tdp {

enum class LayerKind : std::uint8_t {
  kConv = 0,
  kDropout = 1,
  kAvgPoolF = 2,  // mean over kf frequency bins
  kAvgPoolT = 3,  // mean over the whole temporal extent (kt entries nominal)
};

enum class Activation : std::uint8_t { kNone = 0, kRelu = 1, kSigmoid = 2 };

struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::kConv;
  int kt = 1;
  int kf = 1;
  int stride_t = 1;
  int stride_f = 1;
  int c_in = 1;
  int c_out = 1;
  Activation activation = Activation::kNone;

  bool is_conv() const { return kind == LayerKind::kConv; }
  std::size_t parameter_count() const {
    return is_conv() ? static_cast<std::size_t>(kt) * kf * c_in * c_out + c_out : 0;
  }
  bool operator==(const LayerSpec&) const = default;
};

struct Shape {
  int t = 0;
  int f = 0;
  int c = 0;

  std::size_t elements() const { return static_cast<std::size_t>(t) * f * c; }
  bool operator==(const Shape&) const = default;
};

struct NetworkSpec {
  std::vector<LayerSpec> layers;
  int input_t = 24;
  int input_f = 64;
  int input_c = 1;

  std::size_t parameter_count() const;

  // Shape entering the network followed by the shape after each layer, for a
  // temporal input extent of `t`. Throws DimensionError when layers do not
  // chain.
  std::vector<Shape> stage_shapes(int t) const;
  std::vector<Shape> stage_shapes() const { return stage_shapes(input_t); }

  // Index of the time-average layer, if any.
  std::optional<std::size_t> time_pool_index() const;

  // Product of the temporal strides of every layer before the time average
  // (or of every layer when there is none).
  int temporal_reduction() const;

  bool operator==(const NetworkSpec&) const = default;
};

// The seismic classifier: 24x64x1 spectrogram in, one probability out.
NetworkSpec canonical_network();

// Weights for one layer: nothing for parameter-free layers, float32 or
// power-of-two codes for convolutions.
using LayerWeights = std::variant<std::monostate, ConvKernel, QuantizedKernel>;

struct WeightStore {
  NetworkSpec net;
  std::vector<LayerWeights> layers;  // parallel to net.layers

  // Float kernel for a conv layer (decoded when quantized).
  ConvKernel kernel(std::size_t layer) const;

  // Bytes of parameter payload as stored: 4 per float parameter, 1 per code.
  std::size_t payload_bytes() const;
  bool is_quantized() const;

  // Throws WeightError when the payloads disagree with `net`.
  void validate() const;
  bool operator==(const WeightStore&) const = default;
};

WeightStore zero_weights(const NetworkSpec& net);

// Uniform weights in [-scale, scale] from a seeded generator. Scale defaults
// to a fan-in based value (sqrt(6 / fan_in)) when `scale` <= 0.
WeightStore random_weights(const NetworkSpec& net, std::uint64_t seed,
                           float scale = 0.0f);

Tensor3 apply_activation(Tensor3 x, Activation act);

// Full layer-by-layer inference. `input` must match the network's frequency
// and channel extents; its temporal extent must be at least net.input_t and a
// multiple of temporal_reduction(). Longer inputs are averaged over their whole
// length by the time-average layer.
float infer_batch(const NetworkSpec& net, const WeightStore& weights,
                  const Tensor3& input);

// Output of the layers in front of the time average, i.e. the per-step
// entries the time average consumes.
Tensor3 batch_features(const NetworkSpec& net, const WeightStore& weights,
                       const Tensor3& input);

// Batch reference for sliding classification: runs the stack once over the
// whole input, then for every window of kt consecutive time-average entries
// (stride one entry) finishes the network. For an input of exactly
// net.input_t columns this returns {infer_batch(...)}.
std::vector<float> infer_batch_sliding(const NetworkSpec& net,
                                       const WeightStore& weights,
                                       const Tensor3& input);

// Largest producer + consumer footprint of layer-by-layer execution, in bytes
// of 32-bit values. Stages are the input and every non-dropout layer output.
std::size_t peak_intermediate_bytes(const NetworkSpec& net, int input_t);

// Multiply-accumulates of one batch pass over `input_t` columns.
std::size_t batch_mac_count(const NetworkSpec& net, int input_t);

const char* to_string(LayerKind kind);
const char* to_string(Activation act);

}  // namespace tdp

#endif  // TDP_NETWORK_HPP_
