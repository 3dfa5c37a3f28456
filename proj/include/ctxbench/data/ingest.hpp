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
#include <filesystem>
#include <span>
#include <vector>

#include "ctxbench/data/csv.hpp"
#include "ctxbench/data/types.hpp"

namespace ctxbench::data {

struct AggregateResult {
  FlowSeries series;
  std::size_t accepted = 0;
  std::size_t dropped_out_of_span = 0;
};

// Counts records per location in half-open bins [start + t*interval, start + (t+1)*interval)
// for t in [0, steps). Records outside the span are dropped and counted.
AggregateResult aggregate_trips(std::span<const TripRecord> records, const LocationSet& locations,
                                int interval_minutes, TimePoint start, std::size_t steps);

// Sums groups of interval_minutes / series.interval_minutes consecutive bins; a trailing
// partial group is dropped. The target interval must be a multiple of the source interval.
FlowSeries resample_flow(const FlowSeries& series, int interval_minutes);

struct AlignedWeather {
  WeatherTable table;  // one row per flow interval, timestamped at the interval start
  std::size_t filled_gaps = 0;
};

// Each interval takes the hourly row of the hour containing its start: 30-minute slots repeat
// an hour twice and 120-minute slots take the first hour of the block. Missing hours carry
// the previous row forward and are counted.
AlignedWeather align_weather(const WeatherTable& hourly, TimePoint start, std::size_t steps, int interval_minutes);

std::vector<TripRecord> parse_trips(const CsvTable& table);
LocationSet parse_locations(const CsvTable& table);
WeatherTable parse_weather(const CsvTable& table);
std::map<Date, bool> parse_holidays(const CsvTable& table);
std::vector<PoiRecord> parse_pois(const CsvTable& table);

std::vector<TripRecord> read_trips(const std::filesystem::path& path);
LocationSet read_locations(const std::filesystem::path& path);
WeatherTable read_weather(const std::filesystem::path& path);
std::map<Date, bool> read_holidays(const std::filesystem::path& path);
std::vector<PoiRecord> read_pois(const std::filesystem::path& path);

void write_locations(const std::filesystem::path& path, const LocationSet& locations);
void write_weather(const std::filesystem::path& path, const WeatherTable& weather);
void write_holidays(const std::filesystem::path& path, const std::map<Date, bool>& holidays);
void write_pois(const std::filesystem::path& path, const std::vector<PoiRecord>& pois);

// Flow matrix cache: header "timestamp,<location ids...>", one row per interval.
struct FlowCache {
  FlowSeries series;
  std::vector<std::string> location_ids;
};
void write_flow_cache(const std::filesystem::path& path, const FlowSeries& series,
                      const std::vector<std::string>& location_ids);
FlowCache read_flow_cache(const std::filesystem::path& path);

}  // namespace ctxbench::data
