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

// Multi-node scenario: a shared source schedule is registered by each node
// with some probability and delay, synthesised at 1 ksps, triggered, and
// aggregated into co-detections, inter-arrival statistics and an energy
// estimate.

#ifndef TDP_SIMULATION_HPP_
#define TDP_SIMULATION_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tdp/codetection.hpp"
#include "tdp/energy.hpp"
#include "tdp/synthetic.hpp"

namespace tdp {

enum class SourceShape { kToneBurst, kPulse };

struct ScenarioConfig {
  int nodes = 9;
  double duration_hours = 24.0;
  // Mean events each node records per hour. Sources fire at this rate divided
  // by detection_probability.
  double events_per_hour_per_node = 3.127;
  double event_length = 3.5;  // seconds, post-trigger interval included
  double detection_probability = 1.0;
  double max_delay = 0.1;  // seconds, per node and source
  double burst_mean_size = 1.0;
  double burst_min_spacing = 5.0;
  double burst_extra_spacing = 2.0;

  SourceShape shape = SourceShape::kToneBurst;
  double signal_amplitude = 1000.0;
  double signal_frequency = 20.0;
  double noise_amplitude = 0.0;

  TriggerConfig trigger;
  double codetection_window = 0.5;
  WindowMode window_mode = WindowMode::kTumbling;
  double histogram_bin = 0.1;

  EnergyModel energy;
  DataVolumeModel volume;

  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
};

// Flat "key = value" text, '#' starts a comment. Unknown keys and malformed
// values throw FormatError.
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

struct SimulationResult {
  std::int64_t sources = 0;
  std::vector<EventRecord> events;  // sorted by node_id, timestamp
  std::vector<CodetectionBin> bins;
  std::optional<InterarrivalStats> interarrival;  // empty with < 2 events
  double events_per_hour_per_node = 0.0;
  double mean_event_length = 0.0;
  LifetimeEstimate lifetime;
  std::string energy_report;
};

// Deterministic for a fixed config, whatever the thread count.
SimulationResult simulate(const ScenarioConfig& cfg);

// events.csv, codetections.csv, interarrival.csv, energy.txt
void write_simulation_outputs(const SimulationResult& result,
                              const std::filesystem::path& directory);

}  // namespace tdp

#endif  // TDP_SIMULATION_HPP_
