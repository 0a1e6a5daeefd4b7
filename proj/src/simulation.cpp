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

#include "tdp/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "tdp/errors.hpp"

namespace tdp {

void ScenarioConfig::validate() const {
  if (nodes < 0) throw ParameterError("nodes must be >= 0");
  if (!(duration_hours >= 0.0)) throw ParameterError("duration_hours must be >= 0");
  if (!(events_per_hour_per_node >= 0.0)) throw ParameterError("event rate must be >= 0");
  if (!(event_length > 0.0)) throw ParameterError("event_length must be positive");
  if (!(detection_probability > 0.0 && detection_probability <= 1.0)) {
    throw ParameterError("detection_probability must lie in (0, 1]");
  }
  if (!(max_delay >= 0.0)) throw ParameterError("max_delay must be >= 0");
  if (!(noise_amplitude >= 0.0)) throw ParameterError("noise_amplitude must be >= 0");
  if (!(histogram_bin > 0.0)) throw ParameterError("histogram_bin must be positive");
  if (!(codetection_window > 0.0)) throw ParameterError("codetection_window must be positive");
  if (threads < 0) throw ParameterError("threads must be >= 0");
  trigger.validate();
  energy.validate();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw FormatError("bad value for '" + std::string(key) + "': " + std::string(value));
  }
  return out;
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text) {
  ScenarioConfig cfg;
  using Setter = std::function<void(std::string_view, std::string_view)>;
  auto real = [](double& field) -> Setter {
    return [&field](std::string_view k, std::string_view v) { field = parse_number<double>(k, v); };
  };
  auto integer = [](int& field) -> Setter {
    return [&field](std::string_view k, std::string_view v) { field = parse_number<int>(k, v); };
  };
  const std::map<std::string, Setter, std::less<>> setters = {
      {"nodes", integer(cfg.nodes)},
      {"duration_hours", real(cfg.duration_hours)},
      {"events_per_hour_per_node", real(cfg.events_per_hour_per_node)},
      {"event_length_s", real(cfg.event_length)},
      {"detection_probability", real(cfg.detection_probability)},
      {"max_delay_s", real(cfg.max_delay)},
      {"burst_mean_size", real(cfg.burst_mean_size)},
      {"burst_min_spacing_s", real(cfg.burst_min_spacing)},
      {"burst_extra_spacing_s", real(cfg.burst_extra_spacing)},
      {"signal_amplitude", real(cfg.signal_amplitude)},
      {"signal_frequency_hz", real(cfg.signal_frequency)},
      {"noise_amplitude", real(cfg.noise_amplitude)},
      {"upper_threshold", real(cfg.trigger.upper_threshold)},
      {"lower_threshold", real(cfg.trigger.lower_threshold)},
      {"bias", real(cfg.trigger.bias)},
      {"post_trigger_s", real(cfg.trigger.post_trigger_interval)},
      {"sample_rate", real(cfg.trigger.sample_rate)},
      {"codetection_window_s", real(cfg.codetection_window)},
      {"histogram_bin_s", real(cfg.histogram_bin)},
      {"active_current_sense_mA", real(cfg.energy.active_current_sense)},
      {"sleep_current_sense_mA", real(cfg.energy.sleep_current_sense)},
      {"active_current_comm_mA", real(cfg.energy.active_current_comm)},
      {"sleep_current_comm_mA", real(cfg.energy.sleep_current_comm)},
      {"avg_current_comm_mA", real(cfg.energy.avg_current_comm)},
      {"battery_capacity_mAh", real(cfg.energy.battery_capacity)},
      {"bytes_per_sample", integer(cfg.volume.bytes_per_sample)},
      {"record_overhead_bytes", integer(cfg.volume.record_overhead)},
      {"threads", integer(cfg.threads)},
      {"seed",
       [&cfg](std::string_view k, std::string_view v) {
         cfg.seed = parse_number<std::uint64_t>(k, v);
       }},
      {"window_mode",
       [&cfg](std::string_view, std::string_view v) {
         if (v == "tumbling") {
           cfg.window_mode = WindowMode::kTumbling;
         } else if (v == "sliding") {
           cfg.window_mode = WindowMode::kSliding;
         } else {
           throw FormatError("window_mode must be tumbling or sliding");
         }
       }},
      {"signal_shape",
       [&cfg](std::string_view, std::string_view v) {
         if (v == "tone") {
           cfg.shape = SourceShape::kToneBurst;
         } else if (v == "pulse") {
           cfg.shape = SourceShape::kPulse;
         } else {
           throw FormatError("signal_shape must be tone or pulse");
         }
       }},
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw FormatError("unknown scenario key '" + std::string(key) + "'");
    it->second(key, value);
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

namespace {

struct Arrival {
  std::int64_t start = 0;  // sample index
};

constexpr std::int64_t kChunk = 1000;

std::vector<EventRecord> run_node(const ScenarioConfig& cfg, int node,
                                  const std::vector<Arrival>& arrivals,
                                  std::int64_t total_samples) {
  const double fs = cfg.trigger.sample_rate;
  const std::int64_t active = std::max<std::int64_t>(
      1, std::llround((cfg.event_length - cfg.trigger.post_trigger_interval) * fs));
  const double margin = std::min(cfg.trigger.upper_threshold - cfg.trigger.bias,
                                 cfg.trigger.bias - cfg.trigger.lower_threshold);
  const bool noise_can_trigger = cfg.noise_amplitude >= margin;

  EventDetector detector(cfg.trigger, node, 0.0);
  std::vector<float> chunk;
  std::size_t next = 0;  // first arrival that may still overlap
  for (std::int64_t c0 = 0; c0 < total_samples; c0 += kChunk) {
    const std::int64_t len = std::min(kChunk, total_samples - c0);
    while (next < arrivals.size() && arrivals[next].start + active <= c0) ++next;
    const bool busy = next < arrivals.size() && arrivals[next].start < c0 + len;
    if (!busy && !noise_can_trigger) {
      detector.skip_quiet(len);
      continue;
    }
    chunk.assign(static_cast<std::size_t>(len), static_cast<float>(cfg.trigger.bias));
    if (cfg.noise_amplitude > 0.0) {
      std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                        static_cast<std::uint32_t>(node), static_cast<std::uint32_t>(c0 / kChunk),
                        static_cast<std::uint32_t>((c0 / kChunk) >> 32)};
      std::mt19937_64 rng(seq);
      add_uniform_noise(chunk, cfg.noise_amplitude, rng);
    }
    for (std::size_t a = next; a < arrivals.size() && arrivals[a].start < c0 + len; ++a) {
      const std::int64_t start = arrivals[a].start - c0;
      if (cfg.shape == SourceShape::kPulse) {
        add_pulse(chunk, start, active, cfg.signal_amplitude);
      } else {
        add_tone_burst(chunk, start, active, cfg.signal_amplitude, cfg.signal_frequency, fs);
      }
    }
    detector.push(chunk);
  }
  detector.finish();
  return detector.take_events();
}

}  // namespace

SimulationResult simulate(const ScenarioConfig& cfg) {
  cfg.validate();
  const double fs = cfg.trigger.sample_rate;
  const double duration = cfg.duration_hours * 3600.0;
  const auto total_samples = static_cast<std::int64_t>(std::llround(duration * fs));

  // The schedule and every node's registrations come from one sequential
  // generator so results do not depend on threading.
  std::mt19937_64 rng(cfg.seed);
  BurstProcess process;
  process.events_per_hour = cfg.events_per_hour_per_node / cfg.detection_probability;
  process.mean_burst_size = cfg.burst_mean_size;
  process.min_spacing = cfg.burst_min_spacing;
  process.mean_extra_spacing = cfg.burst_extra_spacing;
  const std::vector<double> sources = burst_arrivals(process, duration, rng);

  std::vector<std::vector<Arrival>> per_node(static_cast<std::size_t>(cfg.nodes));
  std::bernoulli_distribution registered(cfg.detection_probability);
  std::uniform_real_distribution<double> delay(0.0, cfg.max_delay);
  for (double t : sources) {
    for (auto& arrivals : per_node) {
      const bool hit = registered(rng);
      const double d = cfg.max_delay > 0.0 ? delay(rng) : 0.0;
      if (hit) arrivals.push_back({static_cast<std::int64_t>(std::llround((t + d) * fs))});
    }
  }
  for (auto& arrivals : per_node) {
    std::sort(arrivals.begin(), arrivals.end(),
              [](const Arrival& a, const Arrival& b) { return a.start < b.start; });
  }

  std::vector<std::vector<EventRecord>> detected(per_node.size());
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int workers = std::clamp(cfg.threads > 0 ? cfg.threads : hw, 1, std::max(1, cfg.nodes));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int n = w; n < cfg.nodes; n += workers) {
          detected[n] = run_node(cfg, n, per_node[n], total_samples);
        }
      });
    }
  }

  SimulationResult result;
  result.sources = static_cast<std::int64_t>(sources.size());
  for (auto& events : detected) {
    result.events.insert(result.events.end(), events.begin(), events.end());
  }
  result.bins = codetect(result.events, cfg.codetection_window, cfg.window_mode);
  if (result.events.size() >= 2) {
    result.interarrival = interarrival_stats(result.events, cfg.histogram_bin);
  }

  double total_length = 0.0;
  for (const auto& e : result.events) total_length += e.duration;
  const double node_hours = static_cast<double>(cfg.nodes) * cfg.duration_hours;
  result.events_per_hour_per_node =
      node_hours > 0.0 ? static_cast<double>(result.events.size()) / node_hours : 0.0;
  result.mean_event_length =
      result.events.empty() ? 0.0 : total_length / static_cast<double>(result.events.size());
  result.lifetime = estimate_lifetime(
      cfg.energy, duty_cycle(result.events_per_hour_per_node, result.mean_event_length));
  result.energy_report = energy_report(result.lifetime, result.events_per_hour_per_node,
                                       result.mean_event_length, cfg.volume);
  return result;
}

void write_simulation_outputs(const SimulationResult& result,
                              const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(directory / name, std::ios::binary);
    if (!out) throw FormatError("cannot write " + (directory / name).string());
    out << text;
  };
  write("events.csv", events_csv(result.events));
  write("codetections.csv", codetections_csv(result.bins));
  write("interarrival.csv", result.interarrival ? interarrival_csv(*result.interarrival)
                                                : std::string("bin_start_s,count,cdf\n"));
  write("energy.txt", result.energy_report);
}

}  // namespace tdp
