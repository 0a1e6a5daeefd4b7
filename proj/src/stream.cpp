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

#include "tdp/stream.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "tdp/errors.hpp"

namespace tdp {

namespace {

bool is_body_layer(const LayerSpec& l) {
  return l.kind == LayerKind::kConv || l.kind == LayerKind::kDropout;
}

void activate(std::span<float> values, Activation act) {
  switch (act) {
    case Activation::kNone:
      break;
    case Activation::kRelu:
      relu_inplace(values);
      break;
    case Activation::kSigmoid:
      for (float& v : values) v = static_cast<float>(sigmoid(v));
      break;
  }
}

}  // namespace

std::size_t StreamPlan::staging_bytes() const {
  if (!has_head || layers.empty()) return 0;
  const LayerPlan& last = layers.back();
  const std::size_t tail = static_cast<std::size_t>(last.outputs) * last.f_out * last.c_out;
  const std::size_t entries = static_cast<std::size_t>(average_window) * entry_f * entry_c;
  return (tail + entries) * sizeof(float);
}

StreamPlan derive_plan(const NetworkSpec& net) {
  const std::vector<Shape> shapes = net.stage_shapes();

  std::size_t body_end = 0;
  while (body_end < net.layers.size() && is_body_layer(net.layers[body_end])) ++body_end;

  StreamPlan plan;
  plan.net = net;

  for (std::size_t i = 0; i < body_end; ++i) {
    const LayerSpec& spec = net.layers[i];
    if (!spec.is_conv()) continue;
    if (spec.stride_t > spec.kt) {
      throw UnsupportedArchitecture(spec.name + ": temporal stride " +
                                    std::to_string(spec.stride_t) + " exceeds kernel " +
                                    std::to_string(spec.kt));
    }
    LayerPlan lp;
    lp.layer = i;
    lp.kernel_t = spec.kt;
    lp.stride_t = spec.stride_t;
    lp.f_in = shapes[i].f;
    lp.c_in = shapes[i].c;
    lp.f_out = shapes[i + 1].f;
    lp.c_out = shapes[i + 1].c;
    plan.layers.push_back(lp);
  }
  if (plan.layers.empty()) {
    throw UnsupportedArchitecture("streaming needs at least one leading convolution");
  }

  // Processing windows: product of the temporal strides from each layer on.
  int product = 1;
  for (auto it = plan.layers.rbegin(); it != plan.layers.rend(); ++it) {
    it->outputs = product;
    product *= it->stride_t;
    it->window = product;
  }
  plan.input_window = product;

  // Latency and carry. With input length a multiple of the stride, same
  // padding totals k - s, split floor/ceil between leading and trailing edge.
  int latency = 0;
  for (LayerPlan& lp : plan.layers) {
    const int k = lp.kernel_t;
    const int s = lp.stride_t;
    lp.pad_before = (k - s) / 2;
    const int lookahead = k - 1 - lp.pad_before;
    lp.latency_in = latency;
    // Smallest output lag whose newest input row has arrived by step end.
    const int need = latency + lookahead + 1 - s;
    lp.latency_out = need <= 0 ? 0 : ceil_div(need, s);
    // Carry that makes the ring start exactly at the first row the step's
    // oldest output reads.
    lp.carry = lp.latency_out * s + lp.pad_before - latency;
    if (lp.carry < k - s || lp.carry < 0) {
      throw UnsupportedArchitecture("inconsistent carry derived for " +
                                    net.layers[lp.layer].name);
    }
    latency = lp.latency_out;
  }
  plan.tail_latency = latency;

  for (const LayerPlan& lp : plan.layers) {
    plan.body_macs_per_step += lp.macs_per_step(net.layers[lp.layer]);
  }

  if (body_end == net.layers.size()) return plan;

  // Head: frequency averages and dropouts, the time average, then layers that
  // act on a single time step.
  std::size_t i = body_end;
  while (i < net.layers.size() && (net.layers[i].kind == LayerKind::kAvgPoolF ||
                                   net.layers[i].kind == LayerKind::kDropout)) {
    ++i;
  }
  if (i == net.layers.size() || net.layers[i].kind != LayerKind::kAvgPoolT) {
    throw UnsupportedArchitecture("layer " + net.layers[std::min(i, net.layers.size() - 1)].name +
                                  " cannot be streamed: expected a time average");
  }
  plan.has_head = true;
  plan.time_pool = i;
  plan.average_window = net.layers[i].kt;
  plan.entry_f = shapes[i].f;
  plan.entry_c = shapes[i].c;
  for (std::size_t j = i + 1; j < net.layers.size(); ++j) {
    const LayerSpec& spec = net.layers[j];
    if (spec.kind == LayerKind::kAvgPoolT) {
      throw UnsupportedArchitecture("more than one time average");
    }
    if (spec.is_conv()) {
      if (spec.kt != 1 || spec.stride_t != 1) {
        throw UnsupportedArchitecture(spec.name + " after the time average must be 1 x n");
      }
      plan.head_macs_per_step += static_cast<std::size_t>(shapes[j + 1].f) * spec.kt *
                                 spec.kf * spec.c_in * spec.c_out;
    }
  }
  if (shapes.back().elements() != 1) {
    throw UnsupportedArchitecture("network does not end in a single value");
  }
  return plan;
}

std::size_t plan_memory_bytes(const StreamPlan& plan) {
  std::size_t bytes = 0;
  for (const LayerPlan& lp : plan.layers) bytes += lp.ring_bytes();
  return bytes + plan.staging_bytes();
}

std::size_t step_cost_ops(const StreamPlan& plan) {
  return plan.body_macs_per_step + plan.head_macs_per_step;
}

std::span<float> StreamEngine::Ring::shift(std::size_t n) {
  const std::size_t keep = (columns - n) * column_size;
  if (keep > 0) {
    std::memmove(data.data(), data.data() + n * column_size, keep * sizeof(float));
  }
  return std::span<float>(data).subspan(keep, n * column_size);
}

StreamEngine::StreamEngine(StreamPlan plan, const WeightStore& weights, int emit_every)
    : plan_(std::move(plan)), emit_every_(emit_every) {
  if (!(weights.net == plan_.net)) {
    throw WeightError("weight store was built for a different network");
  }
  weights.validate();
  if (emit_every_ < 1) throw ParameterError("emit_every must be >= 1");

  for (const LayerPlan& lp : plan_.layers) {
    kernels_.push_back(weights.kernel(lp.layer));
    Ring ring;
    ring.column_size = static_cast<std::size_t>(lp.f_in) * lp.c_in;
    ring.columns = lp.ring_columns();
    ring.data.assign(ring.columns * ring.column_size, 0.0f);
    rings_.push_back(std::move(ring));
  }
  const LayerPlan& last = plan_.layers.back();
  tail_ = Tensor3(last.outputs, last.f_out, last.c_out);
  if (plan_.has_head) {
    entries_.column_size = static_cast<std::size_t>(plan_.entry_f) * plan_.entry_c;
    entries_.columns = static_cast<std::size_t>(plan_.average_window);
    entries_.data.assign(entries_.columns * entries_.column_size, 0.0f);
    head_weights_ = weights;
  }
  ready_ = true;
}

void StreamEngine::reset() {
  if (!ready_) return;
  for (Ring& r : rings_) std::fill(r.data.begin(), r.data.end(), 0.0f);
  std::fill(entries_.data.begin(), entries_.data.end(), 0.0f);
  std::fill(tail_.data().begin(), tail_.data().end(), 0.0f);
  finished_ = false;
  steps_ = 0;
  real_steps_ = 0;
  valid_entries_ = 0;
  last_step_macs_ = 0;
  total_macs_ = 0;
  end_steps_.reset();
}

std::size_t StreamEngine::buffer_bytes() const {
  std::size_t floats = 0;
  for (const Ring& r : rings_) floats += r.data.size();
  if (plan_.has_head) floats += tail_.size() + entries_.data.size();
  return floats * sizeof(float);
}

std::optional<Classification> StreamEngine::push(const Tensor3& columns) {
  if (ready_ && (columns.f_len() != plan_.net.input_f || columns.c_len() != plan_.net.input_c ||
                 columns.t_len() != plan_.input_window)) {
    throw DimensionError("push expects " + std::to_string(plan_.input_window) + "x" +
                         std::to_string(plan_.net.input_f) + "x" +
                         std::to_string(plan_.net.input_c) + " columns");
  }
  return push(columns.data());
}

std::optional<Classification> StreamEngine::push(std::span<const float> columns) {
  if (!ready_) throw StateError("stream engine has no plan");
  if (finished_) throw StateError("stream already finished; call reset()");
  const std::size_t expected = static_cast<std::size_t>(plan_.input_window) *
                               plan_.net.input_f * plan_.net.input_c;
  if (columns.size() != expected) {
    throw DimensionError("push expects " + std::to_string(plan_.input_window) +
                         " columns (" + std::to_string(expected) + " values), got " +
                         std::to_string(columns.size()) + " values");
  }
  ++real_steps_;
  return step(columns);
}

std::vector<Classification> StreamEngine::finish() {
  if (!ready_) throw StateError("stream engine has no plan");
  if (finished_) throw StateError("stream already finished; call reset()");
  end_steps_ = real_steps_;
  const std::vector<float> zeros(static_cast<std::size_t>(plan_.input_window) *
                                     plan_.net.input_f * plan_.net.input_c,
                                 0.0f);
  std::vector<Classification> out;
  for (int i = 0; i < plan_.tail_latency; ++i) {
    if (auto c = step(zeros)) out.push_back(*c);
  }
  finished_ = true;
  return out;
}

StreamEngine::TailColumn StreamEngine::tail() const {
  TailColumn t;
  t.index = steps_ - 1 - plan_.tail_latency;
  t.valid = steps_ > 0 && t.index >= 0 && (!end_steps_ || t.index < *end_steps_);
  t.column = tail_.view();
  return t;
}

std::optional<Classification> StreamEngine::step(std::span<const float> columns) {
  last_step_macs_ = 0;
  std::span<float> in = rings_[0].shift(static_cast<std::size_t>(plan_.input_window));
  std::copy(columns.begin(), columns.end(), in.begin());

  for (std::size_t l = 0; l < plan_.layers.size(); ++l) {
    const std::size_t produced = static_cast<std::size_t>(plan_.layers[l].outputs);
    std::span<float> out =
        l + 1 < plan_.layers.size() ? rings_[l + 1].shift(produced) : tail_.data();
    run_layer(l, out);
  }
  ++steps_;
  total_macs_ += last_step_macs_;

  const TailColumn t = tail();
  if (!plan_.has_head || !t.valid) return std::nullopt;

  // Frequency averages turn the tail column into one time-average entry.
  Tensor3 entry = tail_;
  for (std::size_t i = plan_.layers.back().layer + 1; i < plan_.time_pool; ++i) {
    if (plan_.net.layers[i].kind == LayerKind::kAvgPoolF) {
      entry = avg_pool(entry, 1, plan_.net.layers[i].kf);
    }
  }
  std::span<float> slot = entries_.shift(1);
  std::copy(entry.data().begin(), entry.data().end(), slot.begin());
  ++valid_entries_;

  if (valid_entries_ < plan_.average_window) return std::nullopt;
  const std::int64_t window = t.index - plan_.average_window + 1;
  if (window % emit_every_ != 0) return std::nullopt;
  auto c = run_head();
  last_step_macs_ += plan_.head_macs_per_step;
  total_macs_ += plan_.head_macs_per_step;
  if (c) {
    c->window = window;
    c->first_column = window * plan_.input_window;
  }
  return c;
}

void StreamEngine::run_layer(std::size_t l, std::span<float> out) {
  const LayerPlan& lp = plan_.layers[l];
  const LayerSpec& spec = plan_.net.layers[lp.layer];
  const std::int64_t first = steps_ * lp.outputs - lp.latency_out;
  const int lo = static_cast<int>(std::clamp<std::int64_t>(-first, 0, lp.outputs));
  const int hi = end_steps_ ? static_cast<int>(std::clamp<std::int64_t>(
                                  *end_steps_ * lp.outputs - first, 0, lp.outputs))
                            : lp.outputs;

  std::fill(out.begin(), out.end(), 0.0f);
  if (lo >= hi) return;
  last_step_macs_ += static_cast<std::size_t>(hi - lo) * lp.f_out * spec.kt * spec.kf *
                     spec.c_in * spec.c_out;
  const std::size_t column = static_cast<std::size_t>(lp.f_out) * lp.c_out;
  std::span<float> valid = out.subspan(lo * column, (hi - lo) * column);
  // The carry is chosen so that output 0 of this step reads from ring row 0.
  conv2d_rows(rings_[l].view(lp.f_in, lp.c_in), kernels_[l], lo * lp.stride_t,
              lp.stride_t, spec.stride_f, hi - lo, valid);
  activate(valid, spec.activation);
}

std::optional<Classification> StreamEngine::run_head() {
  Tensor3 x(plan_.average_window, plan_.entry_f, plan_.entry_c, entries_.data);
  for (std::size_t i = plan_.time_pool; i < plan_.net.layers.size(); ++i) {
    const LayerSpec& spec = plan_.net.layers[i];
    switch (spec.kind) {
      case LayerKind::kAvgPoolT:
        x = avg_pool(x, x.t_len(), 1);
        break;
      case LayerKind::kAvgPoolF:
        x = avg_pool(x, 1, spec.kf);
        break;
      case LayerKind::kConv:
        x = apply_activation(
            conv2d_same(x, head_weights_.kernel(i), spec.stride_t, spec.stride_f),
            spec.activation);
        break;
      case LayerKind::kDropout:
        break;
    }
  }
  Classification c;
  c.probability = x.data()[0];
  return c;
}

}  // namespace tdp
