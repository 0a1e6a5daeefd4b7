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

// Time-distributed (streaming) execution of a sequential temporal CNN.
//
// Every convolution up to the time average owns a ring of
// (carry + window) input columns. One step pushes `window` new columns into
// the first ring; each layer then produces window / stride output columns into
// the next ring and the oldest columns fall off the front. The layers after the
// time average run once per step on a sliding set of per-step entries.
//
// Index bookkeeping. Each layer's output stream is indexed like the batch
// output of the whole sequence. A layer with kernel k, stride s and leading
// same-padding P reads input rows i*s - P .. i*s - P + k - 1 for output i, so
// it can only emit output i once that last row has arrived. The plan records
// this latency per layer and chooses the carry so that the ring always holds
// exactly the rows the next outputs need. Outputs with negative index stand in
// for leading padding and are forced to zero; so are outputs past the end once
// the sequence length is known (finish()).

#ifndef TDP_STREAM_HPP_
#define TDP_STREAM_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tdp/network.hpp"

namespace tdp {

struct LayerPlan {
  std::size_t layer = 0;  // index into NetworkSpec::layers
  int kernel_t = 1;
  int stride_t = 1;
  int pad_before = 0;  // leading temporal same-padding
  int window = 1;      // new input columns per step (p)
  int carry = 0;       // columns kept from earlier steps (b)
  int outputs = 1;     // output columns per step, window / stride_t
  int latency_in = 0;  // input column index lag at step boundaries
  int latency_out = 0;
  int f_in = 1;
  int c_in = 1;
  int f_out = 1;
  int c_out = 1;

  std::size_t ring_columns() const { return static_cast<std::size_t>(carry) + window; }
  std::size_t ring_bytes() const {
    return ring_columns() * f_in * c_in * sizeof(float);
  }
  std::size_t macs_per_step(const LayerSpec& spec) const {
    return static_cast<std::size_t>(outputs) * f_out * spec.kt * spec.kf * spec.c_in *
           spec.c_out;
  }
};

struct StreamPlan {
  NetworkSpec net;
  std::vector<LayerPlan> layers;  // conv layers in front of the time average
  int input_window = 1;           // p_0: spectrogram columns per push

  // Classification head (frequency average, time average, trailing layers).
  bool has_head = false;
  std::size_t time_pool = 0;  // index of the time-average layer
  int average_window = 0;     // entries averaged per classification
  int entry_f = 0;            // shape of one time-average entry
  int entry_c = 0;

  // Steps between pushing input step n and the tail layer emitting its
  // output n - tail_latency; also the number of zero steps finish() runs.
  int tail_latency = 0;

  std::size_t body_macs_per_step = 0;
  std::size_t head_macs_per_step = 0;

  // Output staging in front of and inside the time average.
  std::size_t staging_bytes() const;
};

// Throws UnsupportedArchitecture for anything other than
//   (conv | dropout)+ [avg_pool_f | dropout]* [avg_pool_t (time-pointwise)*]
// or a temporal stride larger than its kernel.
StreamPlan derive_plan(const NetworkSpec& net);

// Ring storage plus head staging, 32-bit values. Independent of how many
// columns are eventually streamed.
std::size_t plan_memory_bytes(const StreamPlan& plan);

// Multiply-accumulates per push once warm (body plus one head evaluation).
std::size_t step_cost_ops(const StreamPlan& plan);

struct Classification {
  std::int64_t window = 0;        // index of the first time-average entry
  std::int64_t first_column = 0;  // first input column of the window
  float probability = 0.0f;
};

class StreamEngine {
 public:
  // Unusable until constructed with a plan; push() then throws StateError.
  StreamEngine() = default;
  // `emit_every` > 1 keeps only windows whose index is a multiple of it
  // (use the averaging window for disjoint windows).
  StreamEngine(StreamPlan plan, const WeightStore& weights, int emit_every = 1);

  const StreamPlan& plan() const { return plan_; }

  // `columns` holds input_window * f * c values in (t, f, c) order.
  std::optional<Classification> push(std::span<const float> columns);
  std::optional<Classification> push(const Tensor3& columns);

  // Emulates trailing padding: pushes tail_latency zero steps with outputs
  // past the true end masked. No pushes are accepted afterwards until reset().
  std::vector<Classification> finish();

  void reset();

  // Latest tail-layer output column and its index in the tail output stream.
  // `valid` is false during warm-up and past the end.
  struct TailColumn {
    std::int64_t index = 0;
    bool valid = false;
    TensorView column;
  };
  TailColumn tail() const;

  std::int64_t steps() const { return steps_; }
  std::int64_t columns_seen() const { return real_steps_ * plan_.input_window; }
  bool warm() const { return valid_entries_ >= plan_.average_window && plan_.has_head; }

  // Multiply-accumulates executed by the most recent push or finish step.
  // Warm steps cost exactly step_cost_ops(plan()).
  std::size_t last_step_macs() const { return last_step_macs_; }
  // Since construction or reset(), flush steps included.
  std::size_t total_macs() const { return total_macs_; }

  // Bytes held by rings and staging buffers; equals plan_memory_bytes().
  std::size_t buffer_bytes() const;

 private:
  struct Ring {
    std::vector<float> data;
    std::size_t column_size = 0;
    std::size_t columns = 0;
    // Drops the oldest `n` columns and returns the freed tail.
    std::span<float> shift(std::size_t n);
    TensorView view(int f, int c) const {
      return {data.data(), static_cast<int>(columns), f, c};
    }
  };

  std::optional<Classification> step(std::span<const float> columns);
  void run_layer(std::size_t l, std::span<float> out);
  std::optional<Classification> run_head();

  StreamPlan plan_;
  std::vector<ConvKernel> kernels_;  // one per LayerPlan
  std::vector<Ring> rings_;          // input ring of each LayerPlan
  Tensor3 tail_;                     // outputs of the last planned layer
  Ring entries_;                     // time-average entries
  WeightStore head_weights_;
  bool ready_ = false;
  bool finished_ = false;
  int emit_every_ = 1;
  std::int64_t steps_ = 0;
  std::int64_t real_steps_ = 0;
  std::int64_t valid_entries_ = 0;
  std::size_t last_step_macs_ = 0;
  std::size_t total_macs_ = 0;
  std::optional<std::int64_t> end_steps_;  // real steps once finish() began
};

}  // namespace tdp

#endif  // TDP_STREAM_HPP_
