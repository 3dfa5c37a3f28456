/*
 * Copyright 2026 The ctxbench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ctxbench/data/types.hpp"

namespace ctxbench::data {

// Effect sizes of the generated flow
//   flow[t][n] = max(0, base_n + diurnal*profile(hour) + weekend*is_weekend(day)
//                     + holiday*is_holiday(day) + weather*(temperature - 12)/8 + N(0, noise)).
// profile(h) = exp(-(h-8)^2/4) + exp(-(h-18)^2/4) with h the fractional hour of the slot start.
struct SynthConfig {
  double base_min = 5.0;
  double base_max = 15.0;
  double diurnal = 0.0;
  double weekend = 0.0;
  double holiday = 0.0;
  double weather = 0.0;
  double noise = 0.0;
  // Day offsets (from the start date) that are holidays; when empty each day is a holiday
  // with probability holiday_rate.
  std::vector<std::size_t> holiday_days;
  double holiday_rate = 0.0;
  TimePoint start = TimePoint{Date{std::chrono::year{2024} / 1 / 1}};
};

struct Dataset {
  std::string name;
  FlowSeries flow;
  RawContextTables context;
  LocationSet locations;
};

double diurnal_profile(double hour);
double weather_term(double temperature);

Dataset synth_generate(std::size_t n_locations, std::size_t n_intervals, int interval_minutes,
                       const SynthConfig& config, std::uint64_t seed);

// Directory layout: flow.csv (flow cache), locations.csv, weather.csv, holidays.csv, pois.csv.
// Context files are optional when loading; a missing file leaves that table empty.
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace ctxbench::data
