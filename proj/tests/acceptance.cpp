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

// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "tdp/codetection.hpp"
#include "tdp/energy.hpp"
#include "tdp/network.hpp"
#include "tdp/pow2.hpp"
#include "tdp/preprocess.hpp"
#include "tdp/quantizer.hpp"
#include "tdp/stream.hpp"
#include "tdp/synthetic.hpp"

namespace {

using namespace tdp;
using testing::close_enough;
using testing::random_small_network;
using testing::random_tensor;
using testing::stream_all;

// Streamed memory of the canonical network, pinned once computed.
constexpr std::size_t kCanonicalStreamBytes = 85592;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, double budget_s, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail += " [over time budget]";
  }
  if (!o.pass) ++failures;
  std::printf("%s  %2d  %-32s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title,
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome parameter_accounting() {
  const NetworkSpec net = canonical_network();
  const WeightStore w = random_weights(net, 11, 0.3);
  const WeightStore q = quantize_store(w);
  const std::size_t params = net.parameter_count();
  const std::size_t fbytes = w.payload_bytes();
  const std::size_t qbytes = q.payload_bytes();
  const double factor = static_cast<double>(fbytes) / static_cast<double>(qbytes);
  return {params == 38403 && fbytes == 153612 && qbytes == 38403 && factor == 4.0,
          fmt("%zu params, %zu B float, %zu B quantized, factor %.3f", params, fbytes, qbytes,
              factor)};
}

Outcome batch_memory() {
  const NetworkSpec net = canonical_network();
  const std::size_t b24 = peak_intermediate_bytes(net, 24);
  const std::size_t b232 = peak_intermediate_bytes(net, 232);
  return {b24 == 245760 && b232 == 2375680, fmt("T=24: %zu B, T=232: %zu B", b24, b232)};
}

Outcome streamed_memory() {
  NetworkSpec net = canonical_network();
  const StreamPlan plan24 = derive_plan(net);
  net.input_t = 232;
  const StreamPlan plan232 = derive_plan(net);
  const std::size_t m24 = plan_memory_bytes(plan24);
  const std::size_t m232 = plan_memory_bytes(plan232);

  // The engine holds the same buffers whatever it has streamed.
  const WeightStore w = random_weights(plan24.net, 5, 0.3);
  std::mt19937_64 rng(9);
  StreamEngine a(plan24, w), b(plan24, w);
  stream_all(a, random_tensor(rng, 24, 64, 1));
  stream_all(b, random_tensor(rng, 232, 64, 1));

  const double r24 = 245760.0 / static_cast<double>(m24);
  const double r232 = 2375680.0 / static_cast<double>(m232);
  const bool ok = m24 <= 90000 && m24 == m232 && a.buffer_bytes() == m24 &&
                  b.buffer_bytes() == m24 && r24 >= 2.7 && r232 >= 27.0 &&
                  m24 == kCanonicalStreamBytes;
  return {ok, fmt("%zu B (T=24 and T=232), reduction %.3fx / %.2fx", m24, r24, r232)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(20260101);
  int draws = 0, windows = 0, informative = 0;
  double worst = 0.0;
  auto compare = [&](const NetworkSpec& net, const WeightStore& w, const Tensor3& x) {
    const std::vector<float> batch = infer_batch_sliding(net, w, x);
    StreamEngine engine(derive_plan(net), w);
    const std::vector<float> streamed = stream_all(engine, x);
    if (streamed.size() != batch.size()) return false;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      worst = std::max(worst, static_cast<double>(std::fabs(streamed[i] - batch[i])));
      if (!close_enough(streamed[i], batch[i])) return false;
      if (batch[i] > 0.01f && batch[i] < 0.99f) ++informative;
    }
    windows += static_cast<int>(batch.size());
    ++draws;
    return true;
  };

  const NetworkSpec canonical = canonical_network();
  std::uniform_real_distribution<double> scale(0.05, 0.35);
  std::uniform_int_distribution<int> extra(0, 10);
  for (int i = 0; i < 100; ++i) {
    const WeightStore w = random_weights(canonical, rng(), scale(rng));
    const Tensor3 x = random_tensor(rng, 24 + 4 * extra(rng), 64, 1);
    if (!compare(canonical, w, x)) return {false, fmt("canonical draw %d diverged", i)};
  }
  for (int i = 0; i < 100; ++i) {
    const NetworkSpec net = random_small_network(rng);
    const WeightStore w = random_weights(net, rng(), 0.5);
    const int reduction = net.temporal_reduction();
    const Tensor3 x =
        random_tensor(rng, net.input_t + reduction * extra(rng), net.input_f, net.input_c);
    if (!compare(net, w, x)) return {false, fmt("small network %d diverged", i)};
  }
  // Saturated outputs would make the comparison vacuous.
  return {informative * 2 > windows, fmt("%d draws, %d windows (%d unsaturated), max |diff| %.2g",
                                          draws, windows, informative, worst)};
}

Outcome plan_derivation() {
  const StreamPlan canonical = derive_plan(canonical_network());
  NetworkSpec toy;
  toy.input_t = 4;
  toy.input_f = 4;
  toy.input_c = 1;
  toy.layers = {testing::conv_layer("L0", 3, 1, 1, 1, 1, 1),
                testing::conv_layer("L1", 3, 1, 2, 1, 1, 1)};
  const StreamPlan plan = derive_plan(toy);
  const auto& l = plan.layers;
  const bool ok = canonical.input_window == 4 && l.size() == 2 && l[0].window == 2 &&
                  l[1].window == 2 && l[1].outputs == 1 && l[0].carry == 2 &&
                  l[1].carry == 1 && acquisition_time(4) == 2.56 &&
                  acquisition_time(24) == 12.8;
  return {ok, fmt("canonical p0=%d; toy p0=%d p1=%d b0=%d b1=%d; t(4)=%.2f s t(24)=%.1f s",
                  canonical.input_window, l[0].window, l[1].window, l[0].carry, l[1].carry,
                  acquisition_time(4), acquisition_time(24))};
}

Outcome constant_step_cost() {
  std::mt19937_64 rng(77);
  std::vector<NetworkSpec> nets = {canonical_network()};
  for (int i = 0; i < 30; ++i) nets.push_back(random_small_network(rng));
  int warm_steps = 0;
  for (const NetworkSpec& net : nets) {
    const StreamPlan plan = derive_plan(net);
    StreamEngine engine(plan, random_weights(net, rng(), 0.3));
    const Tensor3 x =
        random_tensor(rng, net.input_t + 12 * net.temporal_reduction(), net.input_f, net.input_c);
    const int p = plan.input_window;
    for (int t = 0; t + p <= x.t_len(); t += p) {
      if (engine.push(x.rows(t, p))) {
        if (engine.last_step_macs() != step_cost_ops(plan)) {
          return {false, fmt("warm step cost %zu != %zu", engine.last_step_macs(),
                             step_cost_ops(plan))};
        }
        ++warm_steps;
      }
    }
  }
  return {warm_steps > 0,
          fmt("%d warm steps over %zu plans; canonical %zu MACs/step", warm_steps, nets.size(),
              step_cost_ops(derive_plan(canonical_network())))};
}

Outcome quantization() {
  std::mt19937_64 rng(4242);
  std::normal_distribution<float> dist(0.0f, 0.2f);
  std::vector<float> w(100000);
  for (float& v : w) v = dist(rng);

  int worse = 0;
  int not_pow2 = 0;
  int unstable = 0;
  // Several codebooks: the fitted one and a few narrower ones.
  const Pow2Codebook fitted = fit_codebook(w);
  for (int shift = 0; shift < 4; ++shift) {
    const Pow2Codebook book{fitted.n1 - shift, fitted.n2 - shift};
    std::vector<float> levels = {0.0f};
    for (int n = book.n1; n <= book.n2; ++n) {
      levels.push_back(std::ldexp(1.0f, n));
      levels.push_back(-std::ldexp(1.0f, n));
    }
    for (float v : w) {
      const float q = quantize_pow2(v, book);
      double best = INFINITY;
      for (float l : levels) best = std::min(best, std::fabs(static_cast<double>(v) - l));
      if (std::fabs(static_cast<double>(v) - q) > best + 1e-12) ++worse;
      int e = 0;
      if (q != 0.0f && (std::frexp(std::fabs(q), &e) != 0.5f || e - 1 < book.n1 || e - 1 > book.n2)) {
        ++not_pow2;
      }
      if (quantize_pow2(q, book) != q || decode_pow2(encode_pow2(v, book), book) != q) ++unstable;
    }
  }

  const NetworkSpec net = canonical_network();
  const WeightStore q1 = quantize_store(random_weights(net, 3, 0.3));
  const WeightStore q2 = quantize_store(dequantize_store(q1));
  const bool idempotent = q1 == q2;
  return {worse == 0 && not_pow2 == 0 && unstable == 0 && idempotent,
          fmt("4x1e5 projections: %d suboptimal, %d off-grid, %d unstable; store idempotent: %s",
              worse, not_pow2, unstable, idempotent ? "yes" : "no")};
}

Outcome energy() {
  const double duty = duty_cycle(3.127, 3.5);
  const LifetimeEstimate e = estimate_lifetime(EnergyModel{}, duty);
  auto within = [](double v, double ref, double rel) { return std::fabs(v - ref) <= rel * ref; };
  const bool ok = std::fabs(100.0 * duty - 0.304) <= 0.001 &&
                  within(e.avg_current_sense, 0.141, 0.01) &&
                  within(e.avg_current_total, 0.986, 0.01) &&
                  within(e.energy_per_day, 23.667, 0.01) && within(e.lifetime_days, 549.0, 0.01);
  return {ok, fmt("duty %.4f%%, sense %.4f mA, total %.4f mA, %.3f mAh/day, %.1f days",
                  100.0 * duty, e.avg_current_sense, e.avg_current_total, e.energy_per_day,
                  e.lifetime_days)};
}

Outcome data_volume() {
  const double daily = daily_acquisition_bytes(3.127, 3.5);
  const double ratio = continuous_daily_bytes() / daily;
  const bool ok = std::fabs(daily - 788000.0) <= 0.15 * 788000.0 &&
                  std::fabs(ratio - 328.0) <= 0.10 * 328.0;
  return {ok, fmt("%.1f kB/day triggered, continuous %.1fx larger", daily / 1000.0, ratio)};
}

Outcome triggering() {
  TriggerConfig cfg;  // +-100, 1 s post-trigger, 1 ksps
  std::mt19937_64 rng(5);

  // Chunking invariance on a busy random signal.
  std::vector<float> x(60000, 0.0f);
  add_uniform_noise(x, 60.0, rng);
  for (int k = 0; k < 12; ++k) {
    add_damped_sinusoid(x, 4000 * k + 500 * (k % 3), 400.0 + 50 * k, 15.0, 3.0, 1000.0);
  }
  const auto whole = detect_events(x, cfg);
  bool invariant = !whole.empty();
  std::uniform_int_distribution<std::size_t> size(1, 3000);
  for (int trial = 0; trial < 20 && invariant; ++trial) {
    EventDetector d(cfg);
    for (std::size_t i = 0; i < x.size();) {
      const std::size_t n = std::min(size(rng), x.size() - i);
      d.push(std::span<const float>(x).subspan(i, n));
      i += n;
    }
    d.finish();
    invariant = d.take_events() == whole;
  }

  // Pulse merging on either side of the post-trigger interval.
  auto pulses = [&](int gap) {
    std::vector<float> s(8000, 0.0f);
    add_pulse(s, 1000, 100, 500.0);
    add_pulse(s, 1100 + gap, 100, 500.0);
    return detect_events(s, cfg).size();
  };
  const bool merge = pulses(1001) == 2 && pulses(999) == 1 && pulses(1000) == 2;

  // Two nodes triggering 0.2 s apart share a bin; 1 s apart they do not.
  std::vector<float> s(6000, 0.0f);
  add_pulse(s, 100, 50, 300.0);
  auto a = detect_events(s, cfg, 0);
  std::vector<float> t(6000, 0.0f);
  add_pulse(t, 300, 50, 300.0);
  auto b = detect_events(t, cfg, 1);
  std::vector<EventRecord> together = a;
  together.insert(together.end(), b.begin(), b.end());
  const auto bins = codetect(together, 0.5);
  const bool co = bins.size() == 1 && bins[0].distinct_sensor_count == 2;
  std::vector<EventRecord> apart = {{0, 0.1}, {1, 1.1}};
  const auto bins2 = codetect(apart, 0.5);
  const bool no_co = bins2.size() == 2 && bins2[0].distinct_sensor_count == 1 &&
                     bins2[1].distinct_sensor_count == 1;

  const double f1 = f1_score(8, 2, 2);
  const bool ok = invariant && merge && co && no_co && f1 == 0.8;
  return {ok, fmt("chunking %s, merge %s, co-detection %s/%s, F1(8,2,2)=%.3f",
                  invariant ? "ok" : "BROKEN", merge ? "ok" : "BROKEN", co ? "ok" : "BROKEN",
                  no_co ? "ok" : "BROKEN", f1)};
}

}  // namespace

int main() {
  run(1, "parameter accounting", 1.0, parameter_accounting);
  run(2, "batch memory accounting", 1.0, batch_memory);
  run(3, "streamed memory", 5.0, streamed_memory);
  run(4, "stream/batch oracle equivalence", 60.0, oracle_equivalence);
  run(5, "plan derivation", 1.0, plan_derivation);
  run(6, "constant per-step cost", 30.0, constant_step_cost);
  run(7, "quantization properties", 10.0, quantization);
  run(8, "energy model", 1.0, energy);
  run(9, "data volume", 1.0, data_volume);
  run(10, "trigger and co-detection", 10.0, triggering);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
