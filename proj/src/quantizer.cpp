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

#include "tdp/quantizer.hpp"

#include <cmath>

#include "tdp/errors.hpp"

namespace tdp {

WeightStore quantize_store(const WeightStore& store) {
  store.validate();
  WeightStore out;
  out.net = store.net;
  for (std::size_t i = 0; i < store.layers.size(); ++i) {
    if (store.net.layers[i].is_conv()) {
      out.layers.emplace_back(quantize_kernel(store.kernel(i)));
    } else {
      out.layers.emplace_back(std::monostate{});
    }
  }
  return out;
}

WeightStore dequantize_store(const WeightStore& store) {
  store.validate();
  WeightStore out;
  out.net = store.net;
  for (std::size_t i = 0; i < store.layers.size(); ++i) {
    if (store.net.layers[i].is_conv()) {
      out.layers.emplace_back(store.kernel(i));
    } else {
      out.layers.emplace_back(std::monostate{});
    }
  }
  return out;
}

float dequantize_infer(const NetworkSpec& net, const WeightStore& qstore,
                       const Tensor3& input) {
  return infer_batch(net, dequantize_store(qstore), input);
}

std::vector<LayerQuantReport> quantization_report(const WeightStore& original,
                                                  const WeightStore& quantized) {
  if (!(original.net == quantized.net)) {
    throw WeightError("report needs two stores of the same network");
  }
  std::vector<LayerQuantReport> report;
  for (std::size_t i = 0; i < original.layers.size(); ++i) {
    const LayerSpec& spec = original.net.layers[i];
    if (!spec.is_conv()) continue;
    const ConvKernel a = original.kernel(i);
    const ConvKernel b = quantized.kernel(i);
    LayerQuantReport r;
    r.name = spec.name;
    r.parameters = spec.parameter_count();
    r.float_bytes = 4 * r.parameters;
    r.quantized_bytes = r.parameters;
    if (const auto* q = std::get_if<QuantizedKernel>(&quantized.layers[i])) r.book = q->book;
    for (std::size_t j = 0; j < a.weights.size(); ++j) {
      r.max_abs_error = std::max(r.max_abs_error,
                                 std::fabs(static_cast<double>(a.weights[j]) - b.weights[j]));
    }
    for (std::size_t j = 0; j < a.bias.size(); ++j) {
      r.max_abs_error =
          std::max(r.max_abs_error, std::fabs(static_cast<double>(a.bias[j]) - b.bias[j]));
    }
    report.push_back(r);
  }
  return report;
}

}  // namespace tdp
