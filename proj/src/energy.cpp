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

#include "tdp/energy.hpp"

#include <algorithm>
#include <cstdio>

#include "tdp/errors.hpp"

namespace tdp {

void EnergyModel::validate() const {
  const double currents[] = {active_current_sense, sleep_current_sense, active_current_comm,
                             sleep_current_comm, avg_current_comm};
  for (double c : currents) {
    if (!(c >= 0.0)) throw ParameterError("currents must be >= 0");
  }
  if (sleep_current_sense > active_current_sense || sleep_current_comm > active_current_comm) {
    throw ParameterError("sleep current exceeds active current");
  }
  if (!(battery_capacity > 0.0)) throw ParameterError("battery capacity must be positive");
}

double duty_cycle(double events_per_hour, double mean_event_length) {
  if (!(events_per_hour >= 0.0) || !(mean_event_length >= 0.0)) {
    throw ParameterError("event rate and length must be >= 0");
  }
  return std::min(1.0, events_per_hour * mean_event_length / 3600.0);
}

LifetimeEstimate estimate_lifetime(const EnergyModel& model, double duty) {
  model.validate();
  if (!(duty >= 0.0 && duty <= 1.0)) throw ParameterError("duty cycle must lie in [0, 1]");
  LifetimeEstimate e;
  e.duty = duty;
  e.avg_current_sense =
      duty * model.active_current_sense + (1.0 - duty) * model.sleep_current_sense;
  e.avg_current_total = e.avg_current_sense + model.avg_current_comm;
  e.energy_per_day = 24.0 * e.avg_current_total;
  if (e.avg_current_total <= 0.0) throw UndefinedValue("lifetime undefined at zero current");
  e.lifetime_days = model.battery_capacity / e.energy_per_day;
  return e;
}

double daily_acquisition_bytes(double events_per_hour, double mean_event_length,
                               const DataVolumeModel& model) {
  const double events_per_day = 24.0 * events_per_hour;
  return events_per_day * (mean_event_length * model.sample_rate * model.bytes_per_sample +
                           model.record_overhead);
}

double continuous_daily_bytes(const DataVolumeModel& model) {
  return 86400.0 * model.sample_rate * model.bytes_per_sample;
}

std::string energy_report(const LifetimeEstimate& e, double events_per_hour,
                          double mean_event_length, const DataVolumeModel& volume) {
  const double daily = daily_acquisition_bytes(events_per_hour, mean_event_length, volume);
  const double continuous = continuous_daily_bytes(volume);
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "events_per_hour_per_node = %.6f\n"
                "mean_event_length_s = %.6f\n"
                "duty_cycle_percent = %.6f\n"
                "avg_current_sense_mA = %.6f\n"
                "avg_current_total_mA = %.6f\n"
                "energy_per_day_mAh = %.6f\n"
                "lifetime_days = %.3f\n"
                "daily_acquisition_bytes = %.0f\n"
                "continuous_daily_bytes = %.0f\n"
                "continuous_ratio = %.3f\n",
                events_per_hour, mean_event_length, 100.0 * e.duty, e.avg_current_sense,
                e.avg_current_total, e.energy_per_day, e.lifetime_days, daily, continuous,
                daily > 0.0 ? continuous / daily : 0.0);
  return buf;
}

}  // namespace tdp
