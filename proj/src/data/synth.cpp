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

#include "ctxbench/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "ctxbench/core/random.hpp"
#include "ctxbench/data/ingest.hpp"

namespace ctxbench::data {

namespace {

constexpr double kMeanTemperature = 12.0;
constexpr double kTemperatureScale = 8.0;

enum Stream : std::uint64_t { kBase, kWeather, kHoliday, kNoise, kCoords, kPoi };

}  // namespace

double diurnal_profile(double hour) {
  return std::exp(-(hour - 8.0) * (hour - 8.0) / 4.0) + std::exp(-(hour - 18.0) * (hour - 18.0) / 4.0);
}

double weather_term(double temperature) { return (temperature - kMeanTemperature) / kTemperatureScale; }

Dataset synth_generate(std::size_t n_locations, std::size_t n_intervals, int interval_minutes,
                       const SynthConfig& config, std::uint64_t seed) {
  if (n_locations == 0 || n_intervals == 0) throw DataError("synth_generate: sizes must be positive");
  if (!valid_interval(interval_minutes)) {
    throw DataError("interval must be 30, 60 or 120 minutes, got " + std::to_string(interval_minutes));
  }
  Dataset ds;
  ds.name = "synthetic";

  Rng coords(derive_seed(seed, kCoords));
  for (std::size_t n = 0; n < n_locations; ++n) {
    char id[32];
    std::snprintf(id, sizeof id, "S%03zu", n);
    ds.locations.ids.push_back(id);
    ds.locations.lat.push_back(41.88 + coords.uniform(-0.03, 0.03));
    ds.locations.lon.push_back(-87.63 + coords.uniform(-0.04, 0.04));
  }

  const TimePoint end = add_minutes(config.start, static_cast<long long>(n_intervals) * interval_minutes);
  const Date first_day = date_of(config.start);
  const auto n_days = static_cast<std::size_t>((date_of(end - std::chrono::seconds(1)) - first_day).count()) + 1;

  // Holidays.
  std::set<std::size_t> holiday_set(config.holiday_days.begin(), config.holiday_days.end());
  if (holiday_set.empty() && config.holiday_rate > 0.0) {
    Rng rng(derive_seed(seed, kHoliday));
    for (std::size_t d = 0; d < n_days; ++d)
      if (rng.uniform(0.0, 1.0) < config.holiday_rate) holiday_set.insert(d);
  }
  for (std::size_t d = 0; d < n_days; ++d) ds.context.holidays[first_day + std::chrono::days(d)] = holiday_set.count(d) > 0;

  // Hourly weather: a daily sinusoid plus a slowly drifting day offset.
  WeatherTable& weather = ds.context.weather;
  weather.columns = {"temperature", "humidity", "wind_speed"};
  {
    Rng rng(derive_seed(seed, kWeather));
    const auto first_hour = std::chrono::floor<std::chrono::hours>(config.start);
    const auto hours = static_cast<std::size_t>(std::chrono::ceil<std::chrono::hours>(end - first_hour).count());
    double drift = 0.0;
    std::string state = "clear";
    for (std::size_t h = 0; h < hours; ++h) {
      const TimePoint t = first_hour + std::chrono::hours(h);
      const int hod = minute_of_day(t) / 60;
      if (hod == 0 || h == 0) drift = 0.7 * drift + rng.normal(0.0, 3.0);
      const double temp = kMeanTemperature + drift + 6.0 * std::sin(2.0 * M_PI * (hod - 9) / 24.0) + rng.normal(0.0, 0.5);
      const double humidity = std::clamp(65.0 - 2.0 * (temp - kMeanTemperature) + rng.normal(0.0, 5.0), 5.0, 100.0);
      const double wind = std::abs(rng.normal(3.0, 1.5));
      const double u = rng.uniform(0.0, 1.0);
      if (u < 0.1) state = "clear";
      else if (u < 0.17) state = "clouds";
      else if (u < 0.2) state = temp < 0.0 ? "snow" : "rain";
      weather.rows.push_back({t, {temp, humidity, wind}, state});
    }
  }

  // Flow.
  Rng base_rng(derive_seed(seed, kBase));
  std::vector<double> base(n_locations);
  for (double& b : base) b = base_rng.uniform(config.base_min, config.base_max);
  Rng noise(derive_seed(seed, kNoise));
  ds.flow.interval_minutes = interval_minutes;
  ds.flow.start = config.start;
  ds.flow.values = ad::Tensor({n_intervals, n_locations});
  const auto hour0 = std::chrono::floor<std::chrono::hours>(config.start);
  for (std::size_t t = 0; t < n_intervals; ++t) {
    const TimePoint slot = ds.flow.time_at(t);
    const double hour = minute_of_day(slot) / 60.0;
    const bool weekend = day_of_week(slot) >= 5;
    const bool holiday = ds.context.holidays.at(date_of(slot));
    const auto wrow = static_cast<std::size_t>((std::chrono::floor<std::chrono::hours>(slot) - hour0).count());
    const double temp = weather.rows[wrow].values[0];
    const double shared = config.diurnal * diurnal_profile(hour) + config.weekend * (weekend ? 1.0 : 0.0) +
                          config.holiday * (holiday ? 1.0 : 0.0) + config.weather * weather_term(temp);
    for (std::size_t n = 0; n < n_locations; ++n) {
      const double eps = config.noise > 0.0 ? noise.normal(0.0, config.noise) : 0.0;
      ds.flow.values.at(t, n) = std::max(0.0, base[n] + shared + eps);
    }
  }

  // POIs.
  static const char* const kCategories[] = {"food", "retail", "office", "education", "leisure"};
  Rng poi(derive_seed(seed, kPoi));
  for (std::size_t n = 0; n < n_locations; ++n) {
    for (const char* c : kCategories) {
      const double count = std::floor(poi.uniform(0.0, 12.0));
      if (count > 0.0) ds.context.pois.push_back({ds.locations.ids[n], c, count});
    }
  }
  return ds;
}

void write_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
  std::filesystem::create_directories(dir);
  write_flow_cache(dir / "flow.csv", dataset.flow, dataset.locations.ids);
  write_locations(dir / "locations.csv", dataset.locations);
  write_weather(dir / "weather.csv", dataset.context.weather);
  write_holidays(dir / "holidays.csv", dataset.context.holidays);
  write_pois(dir / "pois.csv", dataset.context.pois);
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset ds;
  ds.name = dir.filename().string();
  if (ds.name.empty()) ds.name = dir.parent_path().filename().string();
  FlowCache cache = read_flow_cache(dir / "flow.csv");
  ds.flow = std::move(cache.series);
  const LocationSet all = read_locations(dir / "locations.csv");
  const auto index = all.index();
  for (const auto& id : cache.location_ids) {
    const auto it = index.find(id);
    if (it == index.end()) throw DataError("flow.csv column '" + id + "' has no entry in locations.csv");
    ds.locations.ids.push_back(id);
    ds.locations.lat.push_back(all.lat[it->second]);
    ds.locations.lon.push_back(all.lon[it->second]);
  }
  ds.locations.validate();
  if (std::filesystem::exists(dir / "weather.csv")) ds.context.weather = read_weather(dir / "weather.csv");
  if (std::filesystem::exists(dir / "holidays.csv")) ds.context.holidays = read_holidays(dir / "holidays.csv");
  if (std::filesystem::exists(dir / "pois.csv")) ds.context.pois = read_pois(dir / "pois.csv");
  return ds;
}

}  // namespace ctxbench::data
