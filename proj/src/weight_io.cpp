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

#include "tdp/weight_io.hpp"

#include <fstream>
#include <iterator>
#include <string>

#include "tdp/bytes.hpp"
#include "tdp/errors.hpp"

namespace tdp {

namespace {

constexpr std::string_view kMagic = "TDPW";
constexpr std::uint8_t kDtypeFloat = 0;
constexpr std::uint8_t kDtypePow2 = 1;

std::uint32_t checked_u32(int v, const std::string& what) {
  if (v < 0) throw WeightError("negative " + what);
  return static_cast<std::uint32_t>(v);
}

int checked_int(std::uint32_t v, const char* what) {
  if (v > (1u << 24)) throw FormatError(std::string("implausible ") + what);
  return static_cast<int>(v);
}

}  // namespace

std::vector<std::uint8_t> serialize_weights(const WeightStore& store) {
  store.validate();
  const NetworkSpec& net = store.net;
  ByteWriter w;
  w.raw(kMagic);
  w.u32(kWeightFormatVersion);
  w.u32(static_cast<std::uint32_t>(net.layers.size()));
  w.u32(checked_u32(net.input_t, "input_t"));
  w.u32(checked_u32(net.input_f, "input_f"));
  w.u32(checked_u32(net.input_c, "input_c"));

  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const LayerSpec& l = net.layers[i];
    if (l.name.size() > 255) throw WeightError("layer name longer than 255 bytes");
    w.u8(static_cast<std::uint8_t>(l.name.size()));
    w.raw(l.name);
    w.u8(static_cast<std::uint8_t>(l.kind));
    w.u8(static_cast<std::uint8_t>(l.activation));
    for (int v : {l.kt, l.kf, l.stride_t, l.stride_f, l.c_in, l.c_out}) {
      w.u32(checked_u32(v, "layer field"));
    }
    const auto& payload = store.layers[i];
    if (const auto* k = std::get_if<ConvKernel>(&payload)) {
      w.u8(kDtypeFloat);
      for (float v : k->weights) w.f32(v);
      for (float v : k->bias) w.f32(v);
    } else if (const auto* q = std::get_if<QuantizedKernel>(&payload)) {
      w.u8(kDtypePow2);
      w.i8(static_cast<std::int8_t>(q->book.n1));
      w.i8(static_cast<std::int8_t>(q->book.n2));
      w.raw(q->codes);
    } else {
      w.u8(kDtypeFloat);
    }
  }
  return std::move(w.bytes());
}

WeightStore deserialize_weights(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.str(4, "magic") != kMagic) throw FormatError("bad magic, not a TDPW file");
  const std::uint32_t version = r.u32("version");
  if (version != kWeightFormatVersion) {
    throw FormatError("unsupported weight format version " + std::to_string(version));
  }
  const int count = checked_int(r.u32("layer count"), "layer count");

  WeightStore store;
  store.net.input_t = checked_int(r.u32("input_t"), "input_t");
  store.net.input_f = checked_int(r.u32("input_f"), "input_f");
  store.net.input_c = checked_int(r.u32("input_c"), "input_c");

  for (int i = 0; i < count; ++i) {
    LayerSpec l;
    l.name = r.str(r.u8("name length"), "layer name");
    const std::uint8_t kind = r.u8("layer kind");
    if (kind > static_cast<std::uint8_t>(LayerKind::kAvgPoolT)) {
      throw FormatError("unknown layer kind " + std::to_string(kind));
    }
    l.kind = static_cast<LayerKind>(kind);
    const std::uint8_t act = r.u8("activation");
    if (act > static_cast<std::uint8_t>(Activation::kSigmoid)) {
      throw FormatError("unknown activation " + std::to_string(act));
    }
    l.activation = static_cast<Activation>(act);
    l.kt = checked_int(r.u32("kt"), "kt");
    l.kf = checked_int(r.u32("kf"), "kf");
    l.stride_t = checked_int(r.u32("stride_t"), "stride_t");
    l.stride_f = checked_int(r.u32("stride_f"), "stride_f");
    l.c_in = checked_int(r.u32("c_in"), "c_in");
    l.c_out = checked_int(r.u32("c_out"), "c_out");
    const std::uint8_t dtype = r.u8("dtype");

    if (!l.is_conv()) {
      if (dtype != kDtypeFloat) throw FormatError(l.name + ": parameter-free layer with dtype");
      store.layers.emplace_back(std::monostate{});
    } else if (l.kt < 1 || l.kf < 1 || l.c_in < 1 || l.c_out < 1) {
      throw FormatError(l.name + ": non-positive kernel extent");
    } else if (dtype == kDtypeFloat) {
      ConvKernel k(l.kt, l.kf, l.c_in, l.c_out);
      for (float& v : k.weights) v = r.f32("float payload");
      for (float& v : k.bias) v = r.f32("float payload");
      store.layers.emplace_back(std::move(k));
    } else if (dtype == kDtypePow2) {
      QuantizedKernel q;
      q.kt = l.kt;
      q.kf = l.kf;
      q.c_in = l.c_in;
      q.c_out = l.c_out;
      q.book.n1 = r.i8("codebook n1");
      q.book.n2 = r.i8("codebook n2");
      if (q.book.levels() != kPow2Levels) throw FormatError(l.name + ": bad codebook range");
      const auto codes = r.take(q.parameter_count(), "quantized payload");
      q.codes.assign(codes.begin(), codes.end());
      for (std::uint8_t c : q.codes) decode_pow2(c, q.book);  // rejects corrupt codes
      store.layers.emplace_back(std::move(q));
    } else {
      throw FormatError(l.name + ": unknown dtype " + std::to_string(dtype));
    }
    store.net.layers.push_back(std::move(l));
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after last layer");

  try {
    store.net.stage_shapes();
    store.validate();
  } catch (const DimensionError& e) {
    throw FormatError(std::string("embedded network is inconsistent: ") + e.what());
  } catch (const WeightError& e) {
    throw FormatError(std::string("payload does not match network: ") + e.what());
  }
  return store;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

void save_weights(const WeightStore& store, const std::filesystem::path& path) {
  write_file_bytes(path, serialize_weights(store));
}

WeightStore load_weights(const std::filesystem::path& path) {
  return deserialize_weights(read_file_bytes(path));
}

}  // namespace tdp
