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

// Battery lifetime and data volume of an event-triggered sensor node.

#ifndef TDP_ENERGY_HPP_
#define TDP_ENERGY_HPP_

#include <string>

namespace tdp {

// Currents in mA, capacity in mAh. avg_current_comm is an input: it depends
// on radio traffic and is not derived here.
struct EnergyModel {
  double active_current_sense = 35.0;
  double sleep_current_sense = 0.035;
  double active_current_comm = 28.0;
  double sleep_current_comm = 0.005;
  double avg_current_comm = 0.845;
  double battery_capacity = 13000.0;

  void validate() const;
};

// events_per_hour * mean_event_length / 3600, capped at 1.
double duty_cycle(double events_per_hour, double mean_event_length);

struct LifetimeEstimate {
  double duty = 0.0;
  double avg_current_sense = 0.0;  // mA
  double avg_current_total = 0.0;  // mA
  double energy_per_day = 0.0;     // mAh
  double lifetime_days = 0.0;
};

// Throws ParameterError for duty outside [0, 1] and UndefinedValue when the
// total current is zero.
LifetimeEstimate estimate_lifetime(const EnergyModel& model, double duty);

struct DataVolumeModel {
  double sample_rate = 1000.0;
  int bytes_per_sample = 3;  // 24-bit ADC
  int record_overhead = 32;  // bytes per stored event record
};

// Bytes stored per sensor and day when only events are recorded.
double daily_acquisition_bytes(double events_per_hour, double mean_event_length,
                               const DataVolumeModel& model = {});
// Bytes per sensor and day for continuous sampling.
double continuous_daily_bytes(const DataVolumeModel& model = {});

// key = value lines.
std::string energy_report(const LifetimeEstimate& estimate, double events_per_hour,
                          double mean_event_length, const DataVolumeModel& volume = {});

}  // namespace tdp

#endif  // TDP_ENERGY_HPP_
