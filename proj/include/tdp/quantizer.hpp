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

// Whole-store power-of-two quantization. This is the projection step only:
// each conv layer gets its own codebook and every weight and bias is mapped to
// the nearest representable value. There is no retraining.

#ifndef TDP_QUANTIZER_HPP_
#define TDP_QUANTIZER_HPP_

#include <string>
#include <vector>

#include "tdp/network.hpp"

namespace tdp {

// Float layers are projected; quantized layers are decoded and projected
// again, which leaves them unchanged.
WeightStore quantize_store(const WeightStore& store);

// Every quantized layer replaced by its decoded float kernel.
WeightStore dequantize_store(const WeightStore& store);

// Decodes `qstore` and runs batch inference. Corrupt codes throw FormatError.
float dequantize_infer(const NetworkSpec& net, const WeightStore& qstore,
                       const Tensor3& input);

struct LayerQuantReport {
  std::string name;
  std::size_t parameters = 0;
  std::size_t float_bytes = 0;
  std::size_t quantized_bytes = 0;
  Pow2Codebook book;
  double max_abs_error = 0.0;
};

// Per conv layer of `original` vs its quantized counterpart.
std::vector<LayerQuantReport> quantization_report(const WeightStore& original,
                                                  const WeightStore& quantized);

}  // namespace tdp

#endif  // TDP_QUANTIZER_HPP_
