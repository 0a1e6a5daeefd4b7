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

// Self-describing weight container (".tdpw"). All integers little-endian.
//
//   header   "TDPW" | u32 version (=1) | u32 layer_count
//            | u32 input_t | u32 input_f | u32 input_c
//   layer    u8 name_len | name bytes | u8 kind | u8 activation
//            | u32 kt | u32 kf | u32 stride_t | u32 stride_f
//            | u32 c_in | u32 c_out | u8 dtype | payload
//   payload  dtype 0 (float32): conv layers carry kt*kf*c_in*c_out weights
//              then c_out biases as f32; other layers carry nothing
//            dtype 1 (pow2-int8): i8 n1 | i8 n2 | one code byte per weight,
//              then per bias (see pow2.hpp)
//
// Trailing bytes after the last layer are rejected.

#ifndef TDP_WEIGHT_IO_HPP_
#define TDP_WEIGHT_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tdp/network.hpp"

namespace tdp {

inline constexpr std::uint32_t kWeightFormatVersion = 1;

std::vector<std::uint8_t> serialize_weights(const WeightStore& store);

// Throws FormatError on any malformed input.
WeightStore deserialize_weights(std::span<const std::uint8_t> bytes);

void save_weights(const WeightStore& store, const std::filesystem::path& path);
WeightStore load_weights(const std::filesystem::path& path);

// Reads a whole file; throws FormatError when it cannot be opened.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes);

}  // namespace tdp

#endif  // TDP_WEIGHT_IO_HPP_
