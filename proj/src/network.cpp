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

#include "tdp/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "tdp/errors.hpp"

namespace tdp {

namespace {

std::string shape_string(const Shape& s) {
  return std::to_string(s.t) + "x" + std::to_string(s.f) + "x" + std::to_string(s.c);
}

LayerSpec conv(const char* name, int k, int stride, int c_in, int c_out,
               Activation act) {
  return {name, LayerKind::kConv, k, k, stride, stride, c_in, c_out, act};
}

LayerSpec dropout(const char* name, int channels) {
  return {name, LayerKind::kDropout, 1, 1, 1, 1, channels, channels, Activation::kNone};
}

// Runs layers [begin, end) on x.
Tensor3 run_layers(const NetworkSpec& net, const WeightStore& weights, Tensor3 x,
                   std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    const LayerSpec& layer = net.layers[i];
    switch (layer.kind) {
      case LayerKind::kConv:
        x = apply_activation(
            conv2d_same(x, weights.kernel(i), layer.stride_t, layer.stride_f),
            layer.activation);
        break;
      case LayerKind::kDropout:
        break;
      case LayerKind::kAvgPoolF:
        x = avg_pool(x, 1, layer.kf);
        break;
      case LayerKind::kAvgPoolT:
        x = avg_pool(x, x.t_len(), 1);
        break;
    }
  }
  return x;
}

void check_inference_inputs(const NetworkSpec& net, const WeightStore& weights,
                            const Tensor3& input) {
  if (!(weights.net == net)) {
    throw WeightError("weight store was built for a different network");
  }
  weights.validate();
  if (input.f_len() != net.input_f || input.c_len() != net.input_c) {
    throw DimensionError("input " + std::to_string(input.f_len()) + "x" +
                         std::to_string(input.c_len()) +
                         " (frequency x channel) does not match network " +
                         std::to_string(net.input_f) + "x" +
                         std::to_string(net.input_c));
  }
  const int reduction = net.temporal_reduction();
  if (input.t_len() < net.input_t || input.t_len() % reduction != 0) {
    throw DimensionError("input length " + std::to_string(input.t_len()) +
                         " must be >= " + std::to_string(net.input_t) +
                         " and a multiple of " + std::to_string(reduction));
  }
}

}  // namespace

std::size_t NetworkSpec::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.parameter_count();
  return n;
}

std::vector<Shape> NetworkSpec::stage_shapes(int t) const {
  std::vector<Shape> shapes;
  shapes.reserve(layers.size() + 1);
  Shape cur{t, input_f, input_c};
  if (cur.t < 1 || cur.f < 1 || cur.c < 1) {
    throw DimensionError("empty network input " + shape_string(cur));
  }
  shapes.push_back(cur);
  for (const auto& layer : layers) {
    switch (layer.kind) {
      case LayerKind::kConv:
        if (layer.c_in != cur.c) {
          throw DimensionError(layer.name + " expects " + std::to_string(layer.c_in) +
                               " channels, gets " + shape_string(cur));
        }
        if (layer.stride_t < 1 || layer.stride_f < 1 || layer.kt < 1 || layer.kf < 1) {
          throw DimensionError(layer.name + " has non-positive kernel or stride");
        }
        cur = {ceil_div(cur.t, layer.stride_t), ceil_div(cur.f, layer.stride_f),
               layer.c_out};
        break;
      case LayerKind::kDropout:
        if (layer.c_in != cur.c || layer.c_out != cur.c) {
          throw DimensionError(layer.name + " channel count does not match " +
                               shape_string(cur));
        }
        break;
      case LayerKind::kAvgPoolF:
        if (layer.kf < 1 || cur.f % layer.kf != 0) {
          throw DimensionError(layer.name + " window does not divide " + shape_string(cur));
        }
        cur.f /= layer.kf;
        break;
      case LayerKind::kAvgPoolT:
        if (layer.kt < 1 || cur.t < layer.kt) {
          throw DimensionError(layer.name + " needs at least " + std::to_string(layer.kt) +
                               " entries, gets " + shape_string(cur));
        }
        cur.t = 1;
        break;
    }
    shapes.push_back(cur);
  }
  return shapes;
}

std::optional<std::size_t> NetworkSpec::time_pool_index() const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].kind == LayerKind::kAvgPoolT) return i;
  }
  return std::nullopt;
}

int NetworkSpec::temporal_reduction() const {
  const std::size_t end = time_pool_index().value_or(layers.size());
  int product = 1;
  for (std::size_t i = 0; i < end; ++i) {
    if (layers[i].is_conv()) product *= layers[i].stride_t;
  }
  return product;
}

NetworkSpec canonical_network() {
  NetworkSpec net;
  net.input_t = 24;
  net.input_f = 64;
  net.input_c = 1;
  const auto relu = Activation::kRelu;
  net.layers = {
      conv("C0", 3, 1, 1, 32, relu),
      conv("C1", 3, 2, 32, 32, relu),
      dropout("D0", 32),
      conv("C2", 3, 1, 32, 32, relu),
      conv("C3", 3, 2, 32, 32, relu),
      dropout("D1", 32),
      conv("C4", 3, 1, 32, 32, relu),
      conv("C5", 1, 1, 32, 32, relu),
      dropout("D2", 32),
      // 32 -> 1 so that the frequency average sees 6x16x1.
      conv("C6", 1, 1, 32, 1, relu),
      {"Af", LayerKind::kAvgPoolF, 1, 16, 1, 1, 1, 1, Activation::kNone},
      {"At", LayerKind::kAvgPoolT, 6, 1, 1, 1, 1, 1, Activation::kNone},
      conv("C7", 1, 1, 1, 1, Activation::kSigmoid),
  };
  return net;
}

ConvKernel WeightStore::kernel(std::size_t layer) const {
  if (layer >= layers.size()) throw WeightError("no weights for layer " + std::to_string(layer));
  if (const auto* k = std::get_if<ConvKernel>(&layers[layer])) return *k;
  if (const auto* q = std::get_if<QuantizedKernel>(&layers[layer])) return decode_kernel(*q);
  throw WeightError("layer " + std::to_string(layer) + " carries no weights");
}

std::size_t WeightStore::payload_bytes() const {
  std::size_t bytes = 0;
  for (const auto& w : layers) {
    if (const auto* k = std::get_if<ConvKernel>(&w)) {
      bytes += 4 * k->parameter_count();
    } else if (const auto* q = std::get_if<QuantizedKernel>(&w)) {
      bytes += q->codes.size();
    }
  }
  return bytes;
}

bool WeightStore::is_quantized() const {
  bool any = false;
  for (const auto& w : layers) {
    if (std::holds_alternative<ConvKernel>(w)) return false;
    if (std::holds_alternative<QuantizedKernel>(w)) any = true;
  }
  return any;
}

void WeightStore::validate() const {
  if (layers.size() != net.layers.size()) {
    throw WeightError("weight store has " + std::to_string(layers.size()) +
                      " layers, network has " + std::to_string(net.layers.size()));
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& spec = net.layers[i];
    const auto& w = layers[i];
    if (!spec.is_conv()) {
      if (!std::holds_alternative<std::monostate>(w)) {
        throw WeightError(spec.name + " is parameter-free but has weights");
      }
      continue;
    }
    int kt = 0, kf = 0, ci = 0, co = 0;
    if (const auto* k = std::get_if<ConvKernel>(&w)) {
      k->validate();
      kt = k->kt; kf = k->kf; ci = k->c_in; co = k->c_out;
    } else if (const auto* q = std::get_if<QuantizedKernel>(&w)) {
      if (q->codes.size() != q->parameter_count()) {
        throw WeightError(spec.name + " quantized payload has wrong length");
      }
      kt = q->kt; kf = q->kf; ci = q->c_in; co = q->c_out;
    } else {
      throw WeightError(spec.name + " is missing weights");
    }
    if (kt != spec.kt || kf != spec.kf || ci != spec.c_in || co != spec.c_out) {
      throw WeightError(spec.name + " weight shape does not match layer spec");
    }
  }
}

WeightStore zero_weights(const NetworkSpec& net) {
  WeightStore store;
  store.net = net;
  for (const auto& layer : net.layers) {
    if (layer.is_conv()) {
      store.layers.emplace_back(ConvKernel(layer.kt, layer.kf, layer.c_in, layer.c_out));
    } else {
      store.layers.emplace_back(std::monostate{});
    }
  }
  return store;
}

WeightStore random_weights(const NetworkSpec& net, std::uint64_t seed, float scale) {
  WeightStore store = zero_weights(net);
  std::mt19937_64 rng(seed);
  for (auto& w : store.layers) {
    auto* k = std::get_if<ConvKernel>(&w);
    if (k == nullptr) continue;
    const float fan_in = static_cast<float>(k->kt * k->kf * k->c_in);
    const float ws = scale > 0 ? scale : std::sqrt(6.0f / fan_in);
    const float bs = scale > 0 ? scale : 0.1f;
    std::uniform_real_distribution<float> wdist(-ws, ws);
    std::uniform_real_distribution<float> bdist(-bs, bs);
    for (float& v : k->weights) v = wdist(rng);
    for (float& v : k->bias) v = bdist(rng);
  }
  return store;
}

Tensor3 apply_activation(Tensor3 x, Activation act) {
  switch (act) {
    case Activation::kNone:
      return x;
    case Activation::kRelu:
      return relu(std::move(x));
    case Activation::kSigmoid:
      for (float& v : x.data()) v = static_cast<float>(sigmoid(v));
      return x;
  }
  return x;
}

float infer_batch(const NetworkSpec& net, const WeightStore& weights,
                  const Tensor3& input) {
  check_inference_inputs(net, weights, input);
  const Tensor3 out = run_layers(net, weights, input, 0, net.layers.size());
  if (out.size() != 1) {
    throw DimensionError("network output is " + std::to_string(out.t_len()) + "x" +
                         std::to_string(out.f_len()) + "x" +
                         std::to_string(out.c_len()) + ", expected a single value");
  }
  return out.data()[0];
}

Tensor3 batch_features(const NetworkSpec& net, const WeightStore& weights,
                       const Tensor3& input) {
  check_inference_inputs(net, weights, input);
  const auto pool = net.time_pool_index();
  if (!pool) throw UnsupportedArchitecture("network has no time-average layer");
  return run_layers(net, weights, input, 0, *pool);
}

std::vector<float> infer_batch_sliding(const NetworkSpec& net,
                                       const WeightStore& weights,
                                       const Tensor3& input) {
  const Tensor3 features = batch_features(net, weights, input);
  const std::size_t pool = *net.time_pool_index();
  const int window = net.layers[pool].kt;
  std::vector<float> out;
  for (int k = 0; k + window <= features.t_len(); ++k) {
    const Tensor3 y =
        run_layers(net, weights, features.rows(k, window), pool, net.layers.size());
    if (y.size() != 1) throw DimensionError("network output is not a single value");
    out.push_back(y.data()[0]);
  }
  return out;
}

std::size_t peak_intermediate_bytes(const NetworkSpec& net, int input_t) {
  const auto shapes = net.stage_shapes(input_t);
  std::vector<std::size_t> stages{shapes[0].elements()};
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (net.layers[i].kind != LayerKind::kDropout) stages.push_back(shapes[i + 1].elements());
  }
  std::size_t peak = stages.size() == 1 ? stages[0] : 0;
  for (std::size_t i = 0; i + 1 < stages.size(); ++i) {
    peak = std::max(peak, stages[i] + stages[i + 1]);
  }
  return peak * sizeof(float);
}

std::size_t batch_mac_count(const NetworkSpec& net, int input_t) {
  const auto shapes = net.stage_shapes(input_t);
  std::size_t macs = 0;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const LayerSpec& layer = net.layers[i];
    if (!layer.is_conv()) continue;
    const Shape& out = shapes[i + 1];
    macs += static_cast<std::size_t>(out.t) * out.f * layer.kt * layer.kf *
            layer.c_in * layer.c_out;
  }
  return macs;
}

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv: return "conv";
    case LayerKind::kDropout: return "dropout";
    case LayerKind::kAvgPoolF: return "avg_pool_f";
    case LayerKind::kAvgPoolT: return "avg_pool_t";
  }
  return "?";
}

const char* to_string(Activation act) {
  switch (act) {
    case Activation::kNone: return "none";
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "?";
}

}  // namespace tdp
