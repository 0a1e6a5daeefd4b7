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

#include "tdp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tdp/errors.hpp"

namespace tdp {

namespace {

// Intersection of [start, start + length) with the span.
std::pair<std::int64_t, std::int64_t> clip(std::int64_t size, std::int64_t start,
                                           std::int64_t length) {
  const std::int64_t lo = std::clamp<std::int64_t>(start, 0, size);
  const std::int64_t hi = std::clamp<std::int64_t>(start + length, 0, size);
  return {lo, std::max(lo, hi)};
}

}  // namespace

void add_pulse(std::span<float> signal, std::int64_t start, std::int64_t length,
               double amplitude) {
  const auto [lo, hi] = clip(static_cast<std::int64_t>(signal.size()), start, length);
  for (std::int64_t i = lo; i < hi; ++i) signal[i] += static_cast<float>(amplitude);
}

void add_tone_burst(std::span<float> signal, std::int64_t start, std::int64_t length,
                    double amplitude, double frequency, double sample_rate) {
  const auto [lo, hi] = clip(static_cast<std::int64_t>(signal.size()), start, length);
  const double w = 2.0 * std::numbers::pi * frequency / sample_rate;
  for (std::int64_t i = lo; i < hi; ++i) {
    signal[i] += static_cast<float>(amplitude * std::cos(w * static_cast<double>(i - start)));
  }
}

void add_damped_sinusoid(std::span<float> signal, std::int64_t start, double amplitude,
                         double frequency, double decay, double sample_rate) {
  const auto size = static_cast<std::int64_t>(signal.size());
  const double w = 2.0 * std::numbers::pi * frequency / sample_rate;
  for (std::int64_t i = std::max<std::int64_t>(start, 0); i < size; ++i) {
    const double t = static_cast<double>(i - start);
    signal[i] += static_cast<float>(amplitude * std::exp(-decay * t / sample_rate) *
                                    std::sin(w * t));
  }
}

void add_uniform_noise(std::span<float> signal, double amplitude, std::mt19937_64& rng) {
  if (amplitude <= 0.0) return;
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  for (float& x : signal) x += static_cast<float>(dist(rng));
}

std::vector<float> sinusoid(std::int64_t n, double frequency, double amplitude,
                            double sample_rate) {
  std::vector<float> out(static_cast<std::size_t>(std::max<std::int64_t>(n, 0)));
  const double w = 2.0 * std::numbers::pi * frequency / sample_rate;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<float>(amplitude * std::sin(w * static_cast<double>(i)));
  }
  return out;
}

std::vector<double> burst_arrivals(const BurstProcess& p, double duration,
                                   std::mt19937_64& rng) {
  if (!(p.events_per_hour >= 0.0) || !(p.mean_burst_size >= 1.0) || !(p.min_spacing >= 0.0) ||
      !(p.mean_extra_spacing >= 0.0) || !(duration >= 0.0)) {
    throw ParameterError("invalid burst process parameters");
  }
  std::vector<double> times;
  if (p.events_per_hour == 0.0 || duration == 0.0) return times;

  const double cluster_rate = p.events_per_hour / p.mean_burst_size / 3600.0;
  std::exponential_distribution<double> gap(cluster_rate);
  std::geometric_distribution<int> extra_members(1.0 / p.mean_burst_size);
  std::exponential_distribution<double> spacing(
      p.mean_extra_spacing > 0.0 ? 1.0 / p.mean_extra_spacing : 1.0);

  for (double t = gap(rng); t < duration; t += gap(rng)) {
    const int members = 1 + (p.mean_burst_size > 1.0 ? extra_members(rng) : 0);
    double member = t;
    for (int m = 0; m < members && member < duration; ++m) {
      times.push_back(member);
      member += p.min_spacing + (p.mean_extra_spacing > 0.0 ? spacing(rng) : 0.0);
    }
  }
  std::sort(times.begin(), times.end());
  return times;
}

}  // namespace tdp
