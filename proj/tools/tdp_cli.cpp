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

// tdp: command-line front end for preprocessing, inference, quantization,
// memory accounting and sensor-network simulation.
//
// Exit codes: 0 success, 2 usage, 3 data format, 4 numeric or shape.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tdp/codetection.hpp"
#include "tdp/errors.hpp"
#include "tdp/network.hpp"
#include "tdp/preprocess.hpp"
#include "tdp/quantizer.hpp"
#include "tdp/simulation.hpp"
#include "tdp/stream.hpp"
#include "tdp/weight_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitFormat = 3;
constexpr int kExitNumeric = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw UsageError("no such file: " + path);
}

tdp::SampleFormat parse_format(const std::string& name) {
  if (name == "f32") return tdp::SampleFormat::kFloat32;
  if (name == "i24") return tdp::SampleFormat::kInt24;
  throw UsageError("unknown sample format '" + name + "' (f32 or i24)");
}

void print_classification(std::int64_t frame, float p, double threshold) {
  std::printf("%lld,%.7g,%d\n", static_cast<long long>(frame), p, p >= threshold ? 1 : 0);
}

struct PreprocessArgs {
  std::string input, output, format = "f32";
};

int run_preprocess(const PreprocessArgs& a) {
  require_file(a.input);
  const auto samples = tdp::read_samples(a.input, parse_format(a.format));
  if (samples.size() < static_cast<std::size_t>(tdp::kSegmentSize)) {
    throw tdp::FormatError(a.input + ": need at least " + std::to_string(tdp::kSegmentSize) +
                           " samples, found " + std::to_string(samples.size()));
  }
  const tdp::Tensor3 spec = tdp::compute_spectrogram(samples);
  if (fs::path(a.output).extension() == ".csv") {
    std::ofstream out(a.output, std::ios::binary);
    out << tdp::spectrogram_csv(spec);
    if (!out) throw tdp::FormatError("cannot write " + a.output);
  } else {
    tdp::write_file_bytes(a.output, tdp::encode_spectrogram(spec));
  }
  std::fprintf(stderr, "%zu samples -> %d columns\n", samples.size(), spec.t_len());
  return 0;
}

struct InferArgs {
  std::string weights, input, mode = "batch", format = "f32";
  int decimate = 1;
  double threshold = 0.5;
};

void stream_columns(tdp::StreamEngine& engine, const tdp::Tensor3& spec, double threshold) {
  const int p = engine.plan().input_window;
  for (int t = 0; t + p <= spec.t_len(); t += p) {
    if (auto c = engine.push(spec.rows(t, p))) {
      print_classification(c->window, c->probability, threshold);
    }
  }
  for (const auto& c : engine.finish()) print_classification(c.window, c.probability, threshold);
}

int run_infer(const InferArgs& a) {
  require_file(a.weights);
  require_file(a.input);
  if (a.decimate < 1) throw UsageError("--decimate must be >= 1");
  const tdp::WeightStore weights = tdp::load_weights(a.weights);
  const tdp::Tensor3 spec = tdp::read_spectrogram(a.input);
  const tdp::NetworkSpec& net = weights.net;
  if (spec.t_len() < net.input_t || spec.t_len() % net.temporal_reduction() != 0) {
    throw tdp::DimensionError("spectrogram has " + std::to_string(spec.t_len()) +
                              " columns; need >= " + std::to_string(net.input_t) +
                              " and a multiple of " + std::to_string(net.temporal_reduction()));
  }

  std::printf("frame_index,probability,decision\n");
  if (a.mode == "batch") {
    const auto probs = tdp::infer_batch_sliding(net, weights, spec);
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (i % static_cast<std::size_t>(a.decimate) == 0) {
        print_classification(static_cast<std::int64_t>(i), probs[i], a.threshold);
      }
    }
  } else if (a.mode == "stream") {
    tdp::StreamEngine engine(tdp::derive_plan(net), weights, a.decimate);
    stream_columns(engine, spec, a.threshold);
  } else {
    throw UsageError("--mode must be batch or stream");
  }
  return 0;
}

// Raw samples straight into the streaming engine, column group by column
// group, without materialising the spectrogram.
int run_stream(const InferArgs& a) {
  require_file(a.weights);
  require_file(a.input);
  if (a.decimate < 1) throw UsageError("--decimate must be >= 1");
  const tdp::WeightStore weights = tdp::load_weights(a.weights);
  if (weights.net.input_f != tdp::kFilterBins || weights.net.input_c != 1) {
    throw tdp::DimensionError("network input does not match 64-bin spectrogram columns");
  }
  const auto samples = tdp::read_samples(a.input, parse_format(a.format));
  tdp::StreamEngine engine(tdp::derive_plan(weights.net), weights, a.decimate);
  const int p = engine.plan().input_window;
  tdp::SpectrogramPipeline pipeline;
  std::vector<float> group;
  std::int64_t columns = 0;

  std::printf("frame_index,probability,decision\n");
  constexpr std::size_t kChunk = 4096;
  for (std::size_t i = 0; i < samples.size(); i += kChunk) {
    const auto chunk = std::span(samples).subspan(i, std::min(kChunk, samples.size() - i));
    for (const auto& col : pipeline.push(chunk)) {
      group.insert(group.end(), col.values.begin(), col.values.end());
      ++columns;
      if (group.size() == static_cast<std::size_t>(p) * tdp::kFilterBins) {
        if (auto c = engine.push(group)) print_classification(c->window, c->probability, a.threshold);
        group.clear();
      }
    }
  }
  if (columns < weights.net.input_t) {
    throw tdp::InsufficientData("signal yields " + std::to_string(columns) +
                                " columns; a classification needs " +
                                std::to_string(weights.net.input_t));
  }
  for (const auto& c : engine.finish()) print_classification(c.window, c.probability, a.threshold);
  if (!group.empty()) {
    std::fprintf(stderr, "dropped %zu trailing column(s) short of a full step\n",
                 group.size() / tdp::kFilterBins);
  }
  return 0;
}

struct QuantizeArgs {
  std::string weights, output;
  bool report = false;
};

int run_quantize(const QuantizeArgs& a) {
  require_file(a.weights);
  const tdp::WeightStore original = tdp::load_weights(a.weights);
  const tdp::WeightStore quantized = tdp::quantize_store(original);
  tdp::save_weights(quantized, a.output);
  if (a.report) {
    std::printf("layer,parameters,float_bytes,quantized_bytes,n1,n2,max_abs_error\n");
    std::size_t float_total = 0, quant_total = 0;
    for (const auto& r : tdp::quantization_report(original, quantized)) {
      std::printf("%s,%zu,%zu,%zu,%d,%d,%.6g\n", r.name.c_str(), r.parameters, r.float_bytes,
                  r.quantized_bytes, r.book.n1, r.book.n2, r.max_abs_error);
      float_total += r.float_bytes;
      quant_total += r.quantized_bytes;
    }
    std::printf("total,%zu,%zu,%zu,,,\n", original.net.parameter_count(), float_total,
                quant_total);
  }
  return 0;
}

struct AccountArgs {
  std::string weights;
  int input_cols = 24;
};

int run_account(const AccountArgs& a) {
  tdp::NetworkSpec net = tdp::canonical_network();
  if (!a.weights.empty()) {
    require_file(a.weights);
    net = tdp::load_weights(a.weights).net;
  }
  if (a.input_cols < net.input_t || a.input_cols % net.temporal_reduction() != 0) {
    throw tdp::DimensionError("--input-cols must be >= " + std::to_string(net.input_t) +
                              " and a multiple of " + std::to_string(net.temporal_reduction()));
  }
  const tdp::StreamPlan plan = tdp::derive_plan(net);
  const std::size_t batch = tdp::peak_intermediate_bytes(net, a.input_cols);
  const std::size_t tdp_bytes = tdp::plan_memory_bytes(plan);
  const std::size_t params = net.parameter_count();
  const int steps = a.input_cols / plan.input_window;
  const int windows = plan.has_head ? steps - plan.average_window + 1 : 0;

  std::printf("input_columns = %d\n", a.input_cols);
  std::printf("parameters = %zu\n", params);
  std::printf("params_float_bytes = %zu\n", params * sizeof(float));
  std::printf("params_quantized_bytes = %zu\n", params);
  std::printf("batch_peak_bytes = %zu\n", batch);
  std::printf("tdp_buffer_bytes = %zu\n", tdp_bytes);
  std::printf("reduction_factor = %.3f\n",
              static_cast<double>(batch) / static_cast<double>(tdp_bytes));
  std::printf("step_columns = %d\n", plan.input_window);
  std::printf("tdp_steps = %d\n", steps);
  std::printf("tdp_outputs = %d\n", windows);
  std::printf("batch_macs = %zu\n", tdp::batch_mac_count(net, a.input_cols));
  std::printf("tdp_macs_per_step = %zu\n", tdp::step_cost_ops(plan));
  std::printf("acquisition_time_s = %.3f\n", tdp::acquisition_time(a.input_cols));
  std::printf("ring,layer,window,carry,bytes\n");
  for (const auto& lp : plan.layers) {
    std::printf("ring,%s,%d,%d,%zu\n", net.layers[lp.layer].name.c_str(), lp.window, lp.carry,
                lp.ring_bytes());
  }
  return 0;
}

struct SimulateArgs {
  std::string config, output_dir = "sim_out";
  int threads = -1;
};

int run_simulate(const SimulateArgs& a) {
  require_file(a.config);
  tdp::ScenarioConfig cfg = tdp::load_scenario(a.config);
  if (a.threads >= 0) cfg.threads = a.threads;
  const tdp::SimulationResult result = tdp::simulate(cfg);
  tdp::write_simulation_outputs(result, a.output_dir);
  std::fputs(result.energy_report.c_str(), stdout);
  std::printf("sources = %lld\nevents = %zu\ncodetection_bins = %zu\n",
              static_cast<long long>(result.sources), result.events.size(), result.bins.size());
  return 0;
}

struct F1Args {
  std::int64_t tp = 0, fp = 0, fn = 0;
};

int run_f1(const F1Args& a) {
  std::printf("%.6f\n", tdp::f1_score(a.tp, a.fp, a.fn));
  return 0;
}

struct InitArgs {
  std::string output;
  std::uint64_t seed = 1;
  double scale = 0.3;
  bool zero = false;
};

int run_init(const InitArgs& a) {
  const tdp::NetworkSpec net = tdp::canonical_network();
  tdp::save_weights(a.zero ? tdp::zero_weights(net) : tdp::random_weights(net, a.seed, a.scale),
                    a.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming temporal CNN inference and event-triggered sensing tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tdp 1.0.0");

  PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "Raw 1 ksps samples to a 64-bin log spectrogram");
  c_pre->add_option("input", pre.input, "Raw little-endian sample file")->required();
  c_pre->add_option("output", pre.output, "Spectrogram file (.csv for text, binary otherwise)")
      ->required();
  c_pre->add_option("--format", pre.format, "Sample encoding: f32 or i24")
      ->check(CLI::IsMember({"f32", "i24"}));

  InferArgs inf;
  auto* c_inf = app.add_subcommand("infer", "Classify a spectrogram (batch or streamed)");
  c_inf->add_option("--weights", inf.weights, "Weight file")->required();
  c_inf->add_option("input", inf.input, "Spectrogram file")->required();
  c_inf->add_option("--mode", inf.mode, "batch or stream")->check(CLI::IsMember({"batch", "stream"}));
  c_inf->add_option("--decimate", inf.decimate, "Emit every n-th window");
  c_inf->add_option("--threshold", inf.threshold, "Decision threshold");

  InferArgs str;
  auto* c_str = app.add_subcommand("stream", "Classify raw samples with the streaming engine");
  c_str->add_option("--weights", str.weights, "Weight file")->required();
  c_str->add_option("input", str.input, "Raw little-endian sample file")->required();
  c_str->add_option("--format", str.format, "Sample encoding: f32 or i24")
      ->check(CLI::IsMember({"f32", "i24"}));
  c_str->add_option("--decimate", str.decimate, "Emit every n-th window");
  c_str->add_option("--threshold", str.threshold, "Decision threshold");

  QuantizeArgs qa;
  auto* c_q = app.add_subcommand("quantize", "Power-of-two quantize a weight file");
  c_q->add_option("input", qa.weights, "Float weight file")->required();
  c_q->add_option("output", qa.output, "Quantized weight file")->required();
  c_q->add_flag("--report", qa.report, "Print a per-layer CSV report");

  AccountArgs acc;
  auto* c_acc = app.add_subcommand("account", "Memory and cost accounting, batch vs streamed");
  c_acc->add_option("--weights", acc.weights, "Weight file (default: canonical network)");
  c_acc->add_option("--input-cols", acc.input_cols, "Spectrogram columns per classification");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Run a multi-node event-triggered scenario");
  c_sim->add_option("config", sim.config, "Scenario file (key = value)")->required();
  c_sim->add_option("--output-dir", sim.output_dir, "Directory for CSV and report outputs");
  c_sim->add_option("--threads", sim.threads, "Worker threads (overrides the config)");

  F1Args f1;
  auto* c_f1 = app.add_subcommand("f1", "F1 score from confusion counts");
  c_f1->add_option("--tp", f1.tp, "True positives")->required();
  c_f1->add_option("--fp", f1.fp, "False positives")->required();
  c_f1->add_option("--fn", f1.fn, "False negatives")->required();

  InitArgs init;
  auto* c_init = app.add_subcommand("init-weights", "Write seeded random (or zero) weights");
  c_init->add_option("output", init.output, "Weight file")->required();
  c_init->add_option("--seed", init.seed, "Generator seed");
  c_init->add_option("--scale", init.scale, "Uniform bound (<= 0: fan-in based)");
  c_init->add_flag("--zero", init.zero, "All-zero weights");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*c_pre) return run_preprocess(pre);
    if (*c_inf) return run_infer(inf);
    if (*c_str) return run_stream(str);
    if (*c_q) return run_quantize(qa);
    if (*c_acc) return run_account(acc);
    if (*c_sim) return run_simulate(sim);
    if (*c_f1) return run_f1(f1);
    if (*c_init) return run_init(init);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const tdp::FormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return kExitFormat;
  } catch (const tdp::WeightError& e) {
    std::fprintf(stderr, "weight error: %s\n", e.what());
    return kExitFormat;
  } catch (const tdp::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitUsage;
}
