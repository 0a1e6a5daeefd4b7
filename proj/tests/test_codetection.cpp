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

#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "tdp/codetection.hpp"
#include "tdp/energy.hpp"
#include "tdp/errors.hpp"
#include "tdp/simulation.hpp"
#include "tdp/synthetic.hpp"

using namespace tdp;

namespace {

EventRecord event(int node, double t, double peak = 1.0) {
  EventRecord e;
  e.node_id = node;
  e.timestamp = t;
  e.peak_amplitude = peak;
  return e;
}

}  // namespace

TEST_CASE("single pulse gives one event") {
  std::vector<float> x(5000, 0.0f);
  add_pulse(x, 500, 100, 1000.0);
  const auto events = detect_events(x, TriggerConfig{});
  REQUIRE(events.size() == 1);
  CHECK(events[0].timestamp == 0.5);
  CHECK(events[0].duration == doctest::Approx(1.1));
  CHECK(events[0].pos_trigger_count == 1);
  CHECK(events[0].neg_trigger_count == 0);
  CHECK(events[0].peak_amplitude == 1000.0);
  CHECK(events[0].peak_position == 0.0);
}

TEST_CASE("tone burst counts both crossings") {
  std::vector<float> x(4000, 0.0f);
  add_tone_burst(x, 1000, 1000, 1000.0, 20.0, 1000.0);
  const auto events = detect_events(x, TriggerConfig{}, 3, 100.0);
  REQUIRE(events.size() == 1);
  CHECK(events[0].node_id == 3);
  CHECK(events[0].timestamp == 101.0);
  // 20 crests plus the rise toward a 21st that the burst cuts short.
  CHECK(events[0].pos_trigger_count == 21);
  CHECK(events[0].neg_trigger_count == 20);
  CHECK(events[0].peak_amplitude == doctest::Approx(1000.0));
}

TEST_CASE("post-trigger interval decides merging") {
  for (const auto& [gap_start, expected] : {std::pair{1599, 1}, std::pair{1600, 2}}) {
    std::vector<float> x(6000, 0.0f);
    add_pulse(x, 500, 100, 1000.0);
    add_pulse(x, gap_start, 10, -1000.0);
    const auto events = detect_events(x, TriggerConfig{});
    CHECK(events.size() == static_cast<std::size_t>(expected));
    if (expected == 1) {
      CHECK(events[0].neg_trigger_count == 1);
      CHECK(events[0].duration == doctest::Approx((gap_start + 10 + 1000 - 500) / 1000.0));
    }
  }
}

TEST_CASE("open event is closed by finish") {
  std::vector<float> x(800, 0.0f);
  add_pulse(x, 700, 50, 1000.0);
  EventDetector detector(TriggerConfig{});
  detector.push(x);
  CHECK(detector.take_events().empty());
  detector.finish();
  const auto events = detector.take_events();
  REQUIRE(events.size() == 1);
  CHECK(events[0].duration == doctest::Approx(1.05));
}

TEST_CASE("skip_quiet matches pushing zeros") {
  std::vector<float> head(2000, 0.0f);
  add_pulse(head, 1500, 200, 500.0);
  for (std::int64_t quiet : {10, 500, 1000, 5000}) {
    EventDetector a(TriggerConfig{}), b(TriggerConfig{});
    a.push(head);
    b.push(head);
    a.push(std::vector<float>(quiet, 0.0f));
    b.skip_quiet(quiet);
    std::vector<float> tail(3000, 0.0f);
    add_pulse(tail, 100, 10, 300.0);
    a.push(tail);
    b.push(tail);
    a.finish();
    b.finish();
    CHECK(a.take_events() == b.take_events());
    CHECK(a.samples_seen() == b.samples_seen());
  }
}

TEST_CASE("bias offsets amplitude") {
  TriggerConfig cfg;
  cfg.bias = 500;
  cfg.upper_threshold = 600;
  cfg.lower_threshold = 400;
  std::vector<float> x(3000, 500.0f);
  add_pulse(x, 100, 5, 200.0);
  const auto events = detect_events(x, cfg);
  REQUIRE(events.size() == 1);
  CHECK(events[0].peak_amplitude == 200.0);
  CHECK(detect_events(std::vector<float>(3000, 550.0f), cfg).empty());

  cfg.bias = 700;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  TriggerConfig negative;
  negative.post_trigger_interval = -1;
  CHECK_THROWS_AS(EventDetector{negative}, ParameterError);
}

TEST_CASE("co-detection windows") {
  const std::vector<EventRecord> events = {event(0, 0.1, 2.0), event(1, 0.3, 5.0),
                                           event(0, 0.4, 1.0), event(2, 0.6, 3.0)};
  const auto tumbling = codetect(events);
  REQUIRE(tumbling.size() == 2);
  CHECK(tumbling[0] == CodetectionBin{0.0, 2, 5.0});
  CHECK(tumbling[1] == CodetectionBin{0.5, 1, 3.0});

  const auto sliding = codetect(events, 0.5, WindowMode::kSliding);
  REQUIRE(sliding.size() == 4);
  CHECK(sliding[0].distinct_sensor_count == 2);
  CHECK(sliding[1].distinct_sensor_count == 3);
  CHECK(sliding[1].max_peak_amplitude == 5.0);
  CHECK(sliding[2].distinct_sensor_count == 2);
  CHECK(sliding[3].distinct_sensor_count == 1);

  CHECK(codetect(std::vector<EventRecord>{}).empty());
  CHECK_THROWS_AS(codetect(events, 0.0), ParameterError);
}

TEST_CASE("co-detection count never exceeds the node count") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> t(0.0, 20.0);
  std::vector<EventRecord> events;
  for (int i = 0; i < 500; ++i) events.push_back(event(i % 5, t(rng)));
  for (auto mode : {WindowMode::kTumbling, WindowMode::kSliding}) {
    for (const auto& b : codetect(events, 0.5, mode)) {
      CHECK(b.distinct_sensor_count >= 1);
      CHECK(b.distinct_sensor_count <= 5);
    }
  }
}

TEST_CASE("inter-arrival histogram") {
  const std::vector<EventRecord> events = {event(0, 1.0), event(1, 0.0), event(2, 0.55),
                                           event(0, 0.25)};
  const auto s = interarrival_stats(events);
  CHECK(s.deltas.size() == 3);
  CHECK(s.histogram == std::vector<std::int64_t>{0, 0, 1, 1, 1});
  CHECK(s.cdf.back() == 1.0);
  CHECK(s.cdf[2] == doctest::Approx(1.0 / 3));
  CHECK(s.mean == doctest::Approx(1.0 / 3));
  CHECK(s.cdf_at(0.31) == doctest::Approx(2.0 / 3));
  CHECK(s.cdf_at(0.1) == 0.0);
  CHECK(interarrival_csv(s) == "bin_start_s,count,cdf\n0.2,1,0.333333\n0.3,1,0.666667\n0.4,1,1.000000\n");

  CHECK_THROWS_AS(interarrival_stats(std::vector<EventRecord>{event(0, 1.0)}), InsufficientData);
  CHECK_THROWS_AS(interarrival_stats(events, 0.0), ParameterError);
}

TEST_CASE("clustered arrivals are mostly short gaps") {
  BurstProcess p;
  p.events_per_hour = 3.0;
  p.mean_burst_size = 6.67;
  p.min_spacing = 5.0;
  p.mean_extra_spacing = 3.0;
  std::mt19937_64 rng(5);
  const auto t = burst_arrivals(p, 2000 * 3600.0, rng);
  CHECK(std::is_sorted(t.begin(), t.end()));
  std::vector<EventRecord> events;
  for (double x : t) events.push_back(event(0, x));
  const auto s = interarrival_stats(events, 1.0);
  // Within-cluster gaps are (k-1)/k of all gaps for mean cluster size k.
  CHECK(s.cdf_at(100.0) == doctest::Approx(1 - 1 / 6.67).epsilon(0.02));
  // Only overlapping clusters produce gaps below the minimum spacing.
  CHECK(s.cdf_at(4.999) < 0.02);

  BurstProcess poisson;
  const auto plain = burst_arrivals(poisson, 10000 * 3600.0, rng);
  CHECK(static_cast<double>(plain.size()) / 10000.0 == doctest::Approx(3.0).epsilon(0.03));
}

TEST_CASE("duty cycle and lifetime") {
  CHECK(duty_cycle(3.127, 3.5) == doctest::Approx(0.0030401).epsilon(1e-4));
  CHECK(duty_cycle(3600, 3600) == 1.0);
  CHECK_THROWS_AS(duty_cycle(-1, 1), ParameterError);

  const EnergyModel model;
  const auto est = estimate_lifetime(model, duty_cycle(3.127, 3.5));
  CHECK(est.avg_current_sense == doctest::Approx(0.1413).epsilon(1e-3));
  CHECK(est.avg_current_total == doctest::Approx(0.9863).epsilon(1e-3));
  CHECK(est.energy_per_day == doctest::Approx(23.671).epsilon(1e-3));
  CHECK(est.lifetime_days == doctest::Approx(549.2).epsilon(1e-3));

  double previous = 1e300;
  for (double d = 0.0; d <= 1.0; d += 0.05) {
    const double life = estimate_lifetime(model, d).lifetime_days;
    CHECK(life < previous);
    previous = life;
  }
  CHECK_THROWS_AS(estimate_lifetime(model, 1.5), ParameterError);
  EnergyModel dead{0, 0, 0, 0, 0, 100};
  CHECK_THROWS_AS(estimate_lifetime(dead, 0.0), UndefinedValue);

  CHECK(daily_acquisition_bytes(3.127, 3.5) == doctest::Approx(790.4e3).epsilon(1e-3));
  CHECK(continuous_daily_bytes() == 259.2e6);
}

TEST_CASE("F1 score") {
  CHECK(f1_score(8, 2, 2) == doctest::Approx(0.8));
  CHECK(f1_score(0, 3, 0) == 0.0);
  CHECK(f1_score(5, 0, 0) == 1.0);
  CHECK_THROWS_AS(f1_score(0, 0, 0), UndefinedValue);
  CHECK_THROWS_AS(f1_score(-1, 0, 2), ParameterError);
}

TEST_CASE("event CSV round trip") {
  std::vector<EventRecord> events = {{2, 12.5, 3.25, 4, 3, 812.5, 0.125},
                                     {7, 3600.001, 1.0, 1, 0, 101, 0.0}};
  CHECK(parse_events_csv(events_csv(events)) == events);
  CHECK_THROWS_AS(parse_events_csv("node_id,x\n1,2\n"), FormatError);
}

TEST_CASE("scenario parsing") {
  const auto cfg = parse_scenario("# comment\nnodes = 3\nwindow_mode = sliding\nsignal_shape = pulse\n"
                                  "upper_threshold = 50 # inline\n");
  CHECK(cfg.nodes == 3);
  CHECK(cfg.window_mode == WindowMode::kSliding);
  CHECK(cfg.shape == SourceShape::kPulse);
  CHECK(cfg.trigger.upper_threshold == 50.0);
  CHECK_THROWS_AS(parse_scenario("nodez = 3\n"), FormatError);
  CHECK_THROWS_AS(parse_scenario("nodes = three\n"), FormatError);
  CHECK_THROWS_AS(parse_scenario("nodes\n"), FormatError);
  CHECK_THROWS_AS(parse_scenario("window_mode = hopping\n"), FormatError);
}

TEST_CASE("simulation is deterministic across thread counts") {
  ScenarioConfig cfg;
  cfg.nodes = 4;
  cfg.duration_hours = 6;
  cfg.noise_amplitude = 20;
  cfg.detection_probability = 0.7;
  cfg.seed = 9;
  cfg.threads = 1;
  const auto a = simulate(cfg);
  cfg.threads = 4;
  const auto b = simulate(cfg);
  CHECK(a.events == b.events);
  CHECK(a.bins == b.bins);
  CHECK(a.energy_report == b.energy_report);
  CHECK(!a.events.empty());
  for (const auto& b : a.bins) CHECK(b.distinct_sensor_count <= cfg.nodes);
}

TEST_CASE("quiet scenario records nothing") {
  ScenarioConfig cfg;
  cfg.nodes = 2;
  cfg.duration_hours = 1;
  cfg.events_per_hour_per_node = 0;
  const auto r = simulate(cfg);
  CHECK(r.sources == 0);
  CHECK(r.events.empty());
  CHECK(!r.interarrival.has_value());
  CHECK(r.lifetime.duty == 0.0);
}

TEST_CASE("simultaneous sources are co-detected") {
  ScenarioConfig cfg;
  cfg.nodes = 2;
  cfg.duration_hours = 4;
  cfg.max_delay = 0.0;
  cfg.seed = 3;
  const auto r = simulate(cfg);
  REQUIRE(r.sources > 0);
  CHECK(r.events.size() == static_cast<std::size_t>(2 * r.sources));
  int both = 0;
  for (const auto& b : r.bins) both += b.distinct_sensor_count == 2;
  CHECK(both == r.sources);
}

TEST_CASE("shipped field configuration reproduces the lifetime estimate") {
  const auto cfg = load_scenario(std::filesystem::path(TDP_SOURCE_DIR) / "configs/field.cfg");
  const auto r = simulate(cfg);
  CHECK(r.lifetime.lifetime_days == doctest::Approx(549.2).epsilon(0.011));
  CHECK(r.mean_event_length == doctest::Approx(3.5).epsilon(0.03));
}
