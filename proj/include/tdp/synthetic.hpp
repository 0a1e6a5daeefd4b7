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

// Seeded test signals and arrival processes. Not a propagation model.

#ifndef TDP_SYNTHETIC_HPP_
#define TDP_SYNTHETIC_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace tdp {

// Adds `amplitude` to samples [start, start + length), clipped to the span.
void add_pulse(std::span<float> signal, std::int64_t start, std::int64_t length,
               double amplitude);

// amplitude * cos(2 pi f t) over [start, start + length); starts on a crest.
void add_tone_burst(std::span<float> signal, std::int64_t start, std::int64_t length,
                    double amplitude, double frequency, double sample_rate);

// amplitude * exp(-decay t) * sin(2 pi f t) from `start` to the end of the span.
void add_damped_sinusoid(std::span<float> signal, std::int64_t start, double amplitude,
                         double frequency, double decay, double sample_rate);

// Uniform noise in [-amplitude, amplitude].
void add_uniform_noise(std::span<float> signal, double amplitude, std::mt19937_64& rng);

std::vector<float> sinusoid(std::int64_t n, double frequency, double amplitude,
                            double sample_rate);

// Clustered arrivals: cluster starts are Poisson, cluster sizes geometric with
// mean `mean_burst_size`, members spaced min_spacing + Exp(mean_extra_spacing).
// mean_burst_size = 1 gives a plain Poisson process.
struct BurstProcess {
  double events_per_hour = 3.0;
  double mean_burst_size = 1.0;
  double min_spacing = 4.0;         // seconds
  double mean_extra_spacing = 2.0;  // seconds
};

// Sorted arrival times in [0, duration).
std::vector<double> burst_arrivals(const BurstProcess& process, double duration,
                                   std::mt19937_64& rng);

}  // namespace tdp

#endif  // TDP_SYNTHETIC_HPP_
