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

// Event-triggered sensing in the digital domain: dual-threshold triggering
// into event records, co-detection windows across nodes, and network-wide
// inter-arrival statistics.

#ifndef TDP_CODETECTION_HPP_
#define TDP_CODETECTION_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tdp {

struct TriggerConfig {
  double upper_threshold = 100.0;
  double lower_threshold = -100.0;
  double bias = 0.0;
  double post_trigger_interval = 1.0;  // seconds
  double sample_rate = 1000.0;

  // Requires lower < bias < upper, a non-negative interval and a positive rate.
  void validate() const;
  std::int64_t post_trigger_samples() const;
};

struct EventRecord {
  int node_id = 0;
  double timestamp = 0.0;  // seconds
  double duration = 0.0;   // seconds
  std::int64_t pos_trigger_count = 0;
  std::int64_t neg_trigger_count = 0;
  double peak_amplitude = 0.0;  // max |x - bias|
  double peak_position = 0.0;   // seconds from event start

  bool operator==(const EventRecord&) const = default;
};

// Streaming trigger state machine for one node.
//
// An event opens on the first rising crossing of the upper threshold or
// falling crossing of the lower one. It stays open until the signal has been
// inside (lower, upper) for the post-trigger interval; the duration runs up to
// the end of that quiet interval. Records come out in time order.
class EventDetector {
 public:
  explicit EventDetector(TriggerConfig cfg, int node_id = 0, double start_time = 0.0);

  void push(std::span<const float> samples);

  // Same as pushing `n` samples that stay strictly inside the thresholds and
  // below the current peak.
  void skip_quiet(std::int64_t n);

  // Closes an open event as if the signal stayed quiet past the end.
  void finish();

  // Completed events since the last call.
  std::vector<EventRecord> take_events();

  std::int64_t samples_seen() const { return index_; }

 private:
  void close(std::int64_t end_exclusive);

  TriggerConfig cfg_;
  int node_id_;
  double start_time_;
  std::int64_t post_samples_;
  std::int64_t index_ = 0;
  bool prev_above_ = false;
  bool prev_below_ = false;

  bool open_ = false;
  std::int64_t start_ = 0;
  std::int64_t last_outside_ = 0;
  std::int64_t peak_index_ = 0;
  double peak_ = 0.0;
  std::int64_t pos_ = 0;
  std::int64_t neg_ = 0;

  std::vector<EventRecord> done_;
};

std::vector<EventRecord> detect_events(std::span<const float> samples,
                                       const TriggerConfig& cfg, int node_id = 0,
                                       double start_time = 0.0);

struct CodetectionBin {
  double window_start = 0.0;
  int distinct_sensor_count = 0;
  double max_peak_amplitude = 0.0;

  bool operator==(const CodetectionBin&) const = default;
};

enum class WindowMode {
  kTumbling,  // windows [k*w, (k+1)*w)
  kSliding,   // one window [t, t+w) per distinct event timestamp
};

// Empty windows are omitted. Output is ordered by window_start.
std::vector<CodetectionBin> codetect(std::span<const EventRecord> events,
                                     double window = 0.5,
                                     WindowMode mode = WindowMode::kTumbling);

struct InterarrivalStats {
  double bin_width = 0.1;
  std::vector<double> deltas;             // sorted ascending
  std::vector<std::int64_t> histogram;    // bin b covers [b*w, (b+1)*w)
  std::vector<double> cdf;                // fraction of deltas below each bin's upper edge
  double mean = 0.0;

  // Fraction of deltas <= x.
  double cdf_at(double x) const;
};

// Gaps between consecutive event timestamps across all nodes. Throws
// InsufficientData for fewer than two events.
InterarrivalStats interarrival_stats(std::span<const EventRecord> events,
                                     double bin_width = 0.1);

// 2tp / (2tp + fn + fp). All-zero counts throw UndefinedValue.
double f1_score(std::int64_t tp, std::int64_t fp, std::int64_t fn);

// node_id,timestamp_s,duration_s,pos_trig,neg_trig,peak,peak_pos_s
std::string events_csv(std::span<const EventRecord> events);
std::vector<EventRecord> parse_events_csv(std::string_view text);
// window_start,count,max_peak
std::string codetections_csv(std::span<const CodetectionBin> bins);
// bin_start_s,count,cdf
std::string interarrival_csv(const InterarrivalStats& stats);

}  // namespace tdp

#endif  // TDP_CODETECTION_HPP_
