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
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctxbench/autodiff/tensor.hpp"
#include "ctxbench/data/time.hpp"

namespace ctxbench::data {

struct LocationSet {
  std::vector<std::string> ids;
  std::vector<double> lat;
  std::vector<double> lon;

  std::size_t size() const { return ids.size(); }
  // Throws DataError on duplicate ids, fewer than two locations or non-finite coordinates.
  void validate() const;
  std::unordered_map<std::string, std::size_t> index() const;
};

bool valid_interval(int interval_minutes);

struct FlowSeries {
  int interval_minutes = 60;
  TimePoint start{};
  ad::Tensor values;  // T x N, non-negative

  std::size_t steps() const { return values.rank() == 2 ? values.dim(0) : 0; }
  std::size_t locations() const { return values.rank() == 2 ? values.dim(1) : 0; }
  TimePoint time_at(std::size_t t) const { return add_minutes(start, static_cast<long long>(t) * interval_minutes); }
  int slots_per_day() const { return 1440 / interval_minutes; }
  void validate() const;
};

struct WeatherRow {
  TimePoint time{};
  std::vector<double> values;  // parallel to WeatherTable::columns
  std::string state;
};

struct WeatherTable {
  std::vector<std::string> columns;  // numeric columns present in the file
  std::vector<WeatherRow> rows;
};

struct PoiRecord {
  std::string location_id;
  std::string category;
  double count = 0.0;
};

struct RawContextTables {
  WeatherTable weather;
  std::map<Date, bool> holidays;
  std::vector<PoiRecord> pois;
};

struct TripRecord {
  std::string location_id;
  TimePoint time{};
};

}  // namespace ctxbench::data
