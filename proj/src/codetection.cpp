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

#include "tdp/codetection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "tdp/errors.hpp"

namespace tdp {

void TriggerConfig::validate() const {
  if (!(lower_threshold < bias && bias < upper_threshold)) {
    throw ParameterError("trigger thresholds must satisfy lower < bias < upper");
  }
  if (!(post_trigger_interval >= 0.0)) throw ParameterError("post-trigger interval must be >= 0");
  if (!(sample_rate > 0.0)) throw ParameterError("sample rate must be positive");
}

std::int64_t TriggerConfig::post_trigger_samples() const {
  return std::llround(post_trigger_interval * sample_rate);
}

EventDetector::EventDetector(TriggerConfig cfg, int node_id, double start_time)
    : cfg_(cfg), node_id_(node_id), start_time_(start_time) {
  cfg_.validate();
  post_samples_ = cfg_.post_trigger_samples();
}

void EventDetector::push(std::span<const float> samples) {
  for (float sample : samples) {
    const double x = sample;
    const bool above = x > cfg_.upper_threshold;
    const bool below = x < cfg_.lower_threshold;
    const bool rising = above && !prev_above_;
    const bool falling = below && !prev_below_;

    if (!open_ && (rising || falling)) {
      open_ = true;
      start_ = index_;
      last_outside_ = index_;
      peak_ = -1.0;
      pos_ = 0;
      neg_ = 0;
    }
    if (open_) {
      if (rising) ++pos_;
      if (falling) ++neg_;
      const double amp = std::fabs(x - cfg_.bias);
      if (amp > peak_) {
        peak_ = amp;
        peak_index_ = index_;
      }
      if (above || below) {
        last_outside_ = index_;
      } else if (index_ - last_outside_ >= post_samples_) {
        close(last_outside_ + 1 + post_samples_);
      }
    }
    prev_above_ = above;
    prev_below_ = below;
    ++index_;
  }
}

void EventDetector::skip_quiet(std::int64_t n) {
  if (n <= 0) return;
  if (open_ && last_outside_ + post_samples_ < index_ + n) {
    close(last_outside_ + 1 + post_samples_);
  }
  prev_above_ = false;
  prev_below_ = false;
  index_ += n;
}

void EventDetector::finish() {
  if (open_) close(last_outside_ + 1 + post_samples_);
}

void EventDetector::close(std::int64_t end_exclusive) {
  EventRecord r;
  r.node_id = node_id_;
  r.timestamp = start_time_ + static_cast<double>(start_) / cfg_.sample_rate;
  r.duration = static_cast<double>(end_exclusive - start_) / cfg_.sample_rate;
  r.pos_trigger_count = pos_;
  r.neg_trigger_count = neg_;
  r.peak_amplitude = peak_;
  r.peak_position = static_cast<double>(peak_index_ - start_) / cfg_.sample_rate;
  done_.push_back(r);
  open_ = false;
}

std::vector<EventRecord> EventDetector::take_events() {
  std::vector<EventRecord> out;
  out.swap(done_);
  return out;
}

std::vector<EventRecord> detect_events(std::span<const float> samples,
                                       const TriggerConfig& cfg, int node_id,
                                       double start_time) {
  EventDetector detector(cfg, node_id, start_time);
  detector.push(samples);
  detector.finish();
  return detector.take_events();
}

std::vector<CodetectionBin> codetect(std::span<const EventRecord> events, double window,
                                     WindowMode mode) {
  if (!(window > 0.0)) throw ParameterError("co-detection window must be positive");
  std::vector<EventRecord> sorted(events.begin(), events.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const EventRecord& a, const EventRecord& b) {
                     return a.timestamp < b.timestamp;
                   });

  std::vector<CodetectionBin> bins;
  auto summarize = [&](double start, auto first, auto last) {
    std::set<int> nodes;
    CodetectionBin bin;
    bin.window_start = start;
    for (auto it = first; it != last; ++it) {
      nodes.insert(it->node_id);
      bin.max_peak_amplitude = std::max(bin.max_peak_amplitude, it->peak_amplitude);
    }
    bin.distinct_sensor_count = static_cast<int>(nodes.size());
    bins.push_back(bin);
  };

  if (mode == WindowMode::kTumbling) {
    auto it = sorted.begin();
    while (it != sorted.end()) {
      const double k = std::floor(it->timestamp / window);
      auto last = it;
      while (last != sorted.end() && std::floor(last->timestamp / window) == k) ++last;
      summarize(k * window, it, last);
      it = last;
    }
  } else {
    for (auto it = sorted.begin(); it != sorted.end(); ++it) {
      if (it != sorted.begin() && std::prev(it)->timestamp == it->timestamp) continue;
      auto last = it;
      while (last != sorted.end() && last->timestamp < it->timestamp + window) ++last;
      summarize(it->timestamp, it, last);
    }
  }
  return bins;
}

double InterarrivalStats::cdf_at(double x) const {
  if (deltas.empty()) return 0.0;
  const auto n = std::upper_bound(deltas.begin(), deltas.end(), x) - deltas.begin();
  return static_cast<double>(n) / static_cast<double>(deltas.size());
}

InterarrivalStats interarrival_stats(std::span<const EventRecord> events, double bin_width) {
  if (events.size() < 2) throw InsufficientData("inter-arrival statistics need >= 2 events");
  if (!(bin_width > 0.0)) throw ParameterError("bin width must be positive");
  std::vector<double> times;
  times.reserve(events.size());
  for (const auto& e : events) times.push_back(e.timestamp);
  std::sort(times.begin(), times.end());

  InterarrivalStats s;
  s.bin_width = bin_width;
  double sum = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    s.deltas.push_back(times[i] - times[i - 1]);
    sum += s.deltas.back();
  }
  std::sort(s.deltas.begin(), s.deltas.end());
  s.mean = sum / static_cast<double>(s.deltas.size());

  // The epsilon keeps values like 0.3 out of the bin below after division.
  auto bin_of = [&](double d) {
    return static_cast<std::size_t>(std::floor(d / bin_width + 1e-9));
  };
  s.histogram.assign(bin_of(s.deltas.back()) + 1, 0);
  for (double d : s.deltas) ++s.histogram[bin_of(d)];
  std::int64_t cumulative = 0;
  for (std::int64_t count : s.histogram) {
    cumulative += count;
    s.cdf.push_back(static_cast<double>(cumulative) / static_cast<double>(s.deltas.size()));
  }
  return s;
}

double f1_score(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  if (tp < 0 || fp < 0 || fn < 0) throw ParameterError("confusion counts must be >= 0");
  if (tp == 0 && fp == 0 && fn == 0) throw UndefinedValue("F1 undefined for an empty confusion matrix");
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fn + fp);
}

std::string events_csv(std::span<const EventRecord> events) {
  std::string out = "node_id,timestamp_s,duration_s,pos_trig,neg_trig,peak,peak_pos_s\n";
  char line[256];
  for (const auto& e : events) {
    std::snprintf(line, sizeof line, "%d,%.6f,%.6f,%lld,%lld,%.6g,%.6f\n", e.node_id,
                  e.timestamp, e.duration, static_cast<long long>(e.pos_trigger_count),
                  static_cast<long long>(e.neg_trigger_count), e.peak_amplitude,
                  e.peak_position);
    out += line;
  }
  return out;
}

std::vector<EventRecord> parse_events_csv(std::string_view text) {
  std::vector<EventRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("node_id", 0) == 0) continue;
    }
    EventRecord e;
    long long pos = 0, neg = 0;
    const int n = std::sscanf(line.c_str(), "%d,%lf,%lf,%lld,%lld,%lf,%lf", &e.node_id,
                              &e.timestamp, &e.duration, &pos, &neg, &e.peak_amplitude,
                              &e.peak_position);
    if (n != 7) throw FormatError("malformed event CSV row " + std::to_string(row));
    e.pos_trigger_count = pos;
    e.neg_trigger_count = neg;
    out.push_back(e);
  }
  return out;
}

std::string codetections_csv(std::span<const CodetectionBin> bins) {
  std::string out = "window_start,count,max_peak\n";
  char line[128];
  for (const auto& b : bins) {
    std::snprintf(line, sizeof line, "%.6f,%d,%.6g\n", b.window_start,
                  b.distinct_sensor_count, b.max_peak_amplitude);
    out += line;
  }
  return out;
}

std::string interarrival_csv(const InterarrivalStats& stats) {
  std::string out = "bin_start_s,count,cdf\n";
  char line[128];
  for (std::size_t b = 0; b < stats.histogram.size(); ++b) {
    if (stats.histogram[b] == 0) continue;
    std::snprintf(line, sizeof line, "%.1f,%lld,%.6f\n", static_cast<double>(b) * stats.bin_width,
                  static_cast<long long>(stats.histogram[b]), stats.cdf[b]);
    out += line;
  }
  return out;
}

}  // namespace tdp
