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

#include "ctxbench/data/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_set>

namespace ctxbench::data {

bool valid_interval(int interval_minutes) {
  return interval_minutes == 30 || interval_minutes == 60 || interval_minutes == 120;
}

void LocationSet::validate() const {
  if (ids.size() < 2) throw DataError("a location set needs at least 2 locations, got " + std::to_string(ids.size()));
  if (lat.size() != ids.size() || lon.size() != ids.size()) throw DataError("location coordinates do not match ids");
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!seen.insert(ids[i]).second) throw DataError("duplicate location id '" + ids[i] + "'");
    if (!std::isfinite(lat[i]) || !std::isfinite(lon[i])) {
      throw DataError("non-finite coordinates for location '" + ids[i] + "'");
    }
  }
}

std::unordered_map<std::string, std::size_t> LocationSet::index() const {
  std::unordered_map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out.emplace(ids[i], i);
  return out;
}

void FlowSeries::validate() const {
  if (!valid_interval(interval_minutes)) {
    throw DataError("interval must be 30, 60 or 120 minutes, got " + std::to_string(interval_minutes));
  }
  if (values.rank() != 2) throw DataError("flow values must be a T x N matrix");
  for (double v : values.data())
    if (!(v >= 0.0) || !std::isfinite(v)) throw DataError("flow values must be finite and non-negative");
}

FlowSeries resample_flow(const FlowSeries& series, int interval_minutes) {
  if (!valid_interval(interval_minutes)) {
    throw DataError("interval must be 30, 60 or 120 minutes, got " + std::to_string(interval_minutes));
  }
  if (interval_minutes % series.interval_minutes != 0) {
    throw DataError("cannot resample " + std::to_string(series.interval_minutes) + "-minute flow to " +
                    std::to_string(interval_minutes) + " minutes");
  }
  const std::size_t k = static_cast<std::size_t>(interval_minutes / series.interval_minutes);
  const std::size_t steps = series.steps() / k, n = series.locations();
  FlowSeries out;
  out.interval_minutes = interval_minutes;
  out.start = series.start;
  out.values = ad::Tensor({steps, n});
  for (std::size_t t = 0; t < steps * k; ++t)
    for (std::size_t i = 0; i < n; ++i) out.values.at(t / k, i) += series.values.at(t, i);
  return out;
}

AggregateResult aggregate_trips(std::span<const TripRecord> records, const LocationSet& locations,
                                int interval_minutes, TimePoint start, std::size_t steps) {
  if (!valid_interval(interval_minutes)) {
    throw DataError("interval must be 30, 60 or 120 minutes, got " + std::to_string(interval_minutes));
  }
  const auto index = locations.index();
  std::set<std::string> unknown;
  for (const TripRecord& r : records)
    if (!index.count(r.location_id)) unknown.insert(r.location_id);
  if (!unknown.empty()) {
    std::ostringstream msg;
    msg << unknown.size() << " unknown location id(s):";
    std::size_t shown = 0;
    for (const auto& id : unknown) {
      if (shown++ == 20) {
        msg << " ...";
        break;
      }
      msg << ' ' << id;
    }
    throw DataError(msg.str());
  }

  AggregateResult out;
  out.series.interval_minutes = interval_minutes;
  out.series.start = start;
  out.series.values = ad::Tensor({steps, locations.size()});
  const long long width = interval_minutes * 60LL;
  for (const TripRecord& r : records) {
    const long long offset = (r.time - start).count();
    if (offset < 0 || offset / width >= static_cast<long long>(steps)) {
      ++out.dropped_out_of_span;
      continue;
    }
    out.series.values.at(static_cast<std::size_t>(offset / width), index.at(r.location_id)) += 1.0;
    ++out.accepted;
  }
  return out;
}

AlignedWeather align_weather(const WeatherTable& hourly, TimePoint start, std::size_t steps, int interval_minutes) {
  if (!valid_interval(interval_minutes)) {
    throw DataError("interval must be 30, 60 or 120 minutes, got " + std::to_string(interval_minutes));
  }
  AlignedWeather out;
  out.table.columns = hourly.columns;
  out.table.rows.reserve(steps);
  const auto hour_of = [](TimePoint t) { return std::chrono::floor<std::chrono::hours>(t); };

  std::size_t cursor = 0;  // first row whose hour is >= the target hour
  for (std::size_t t = 0; t < steps; ++t) {
    const TimePoint slot = add_minutes(start, static_cast<long long>(t) * interval_minutes);
    const auto target = hour_of(slot);
    while (cursor < hourly.rows.size() && hour_of(hourly.rows[cursor].time) < target) ++cursor;
    const WeatherRow* src = nullptr;
    if (cursor < hourly.rows.size() && hour_of(hourly.rows[cursor].time) == target) {
      src = &hourly.rows[cursor];
    } else if (cursor > 0) {
      src = &hourly.rows[cursor - 1];
      ++out.filled_gaps;
    } else {
      throw DataError("weather table does not cover " + format_timestamp(slot));
    }
    WeatherRow row = *src;
    row.time = slot;
    out.table.rows.push_back(std::move(row));
  }
  return out;
}

namespace {

TimePoint require_time(const CsvTable& table, std::size_t row, std::size_t col) {
  const auto t = parse_timestamp(table.rows[row][col]);
  if (!t) table.fail(row, "unparseable timestamp '" + table.rows[row][col] + "'");
  return *t;
}

}  // namespace

std::vector<TripRecord> parse_trips(const CsvTable& table) {
  const std::size_t loc = table.require_column("location_id");
  const std::size_t ts = table.require_column("timestamp");
  std::vector<TripRecord> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) out.push_back({table.rows[r][loc], require_time(table, r, ts)});
  return out;
}

LocationSet parse_locations(const CsvTable& table) {
  const std::size_t id = table.require_column("location_id");
  const std::size_t lat = table.require_column("lat");
  const std::size_t lon = table.require_column("lon");
  LocationSet out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out.ids.push_back(table.rows[r][id]);
    out.lat.push_back(parse_double(table, r, lat));
    out.lon.push_back(parse_double(table, r, lon));
  }
  out.validate();
  return out;
}

WeatherTable parse_weather(const CsvTable& table) {
  const std::size_t ts = table.require_column("timestamp");
  const auto state = table.column("state");
  WeatherTable out;
  std::vector<std::size_t> numeric;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == ts || (state && c == *state)) continue;
    numeric.push_back(c);
    out.columns.push_back(table.header[c]);
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    WeatherRow row;
    row.time = require_time(table, r, ts);
    if (!out.rows.empty() && row.time < out.rows.back().time) table.fail(r, "weather timestamps must be non-decreasing");
    for (std::size_t k = 0; k < numeric.size(); ++k) {
      if (table.rows[r][numeric[k]].empty()) {
        // A blank reading repeats the previous observation.
        if (out.rows.empty()) table.fail(r, "empty value in column '" + out.columns[k] + "' on the first row");
        row.values.push_back(out.rows.back().values[k]);
      } else {
        row.values.push_back(parse_double(table, r, numeric[k]));
      }
    }
    if (state) row.state = table.rows[r][*state];
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::map<Date, bool> parse_holidays(const CsvTable& table) {
  const std::size_t date = table.require_column("date");
  const std::size_t flag = table.require_column("is_holiday");
  std::map<Date, bool> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto d = parse_date(table.rows[r][date]);
    if (!d) table.fail(r, "unparseable date '" + table.rows[r][date] + "'");
    const std::string& f = table.rows[r][flag];
    if (f != "0" && f != "1") table.fail(r, "is_holiday must be 0 or 1, got '" + f + "'");
    out[*d] = f == "1";
  }
  return out;
}

std::vector<PoiRecord> parse_pois(const CsvTable& table) {
  const std::size_t loc = table.require_column("location_id");
  const std::size_t cat = table.require_column("category");
  const std::size_t cnt = table.require_column("count");
  std::vector<PoiRecord> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const double c = parse_double(table, r, cnt);
    if (c < 0.0) table.fail(r, "POI count must be non-negative");
    out.push_back({table.rows[r][loc], table.rows[r][cat], c});
  }
  return out;
}

std::vector<TripRecord> read_trips(const std::filesystem::path& path) { return parse_trips(read_csv(path)); }
LocationSet read_locations(const std::filesystem::path& path) { return parse_locations(read_csv(path)); }
WeatherTable read_weather(const std::filesystem::path& path) { return parse_weather(read_csv(path)); }
std::map<Date, bool> read_holidays(const std::filesystem::path& path) { return parse_holidays(read_csv(path)); }
std::vector<PoiRecord> read_pois(const std::filesystem::path& path) { return parse_pois(read_csv(path)); }

void write_locations(const std::filesystem::path& path, const LocationSet& locations) {
  std::string text = "location_id,lat,lon\n";
  for (std::size_t i = 0; i < locations.size(); ++i) {
    text += locations.ids[i] + ',' + format_double(locations.lat[i]) + ',' + format_double(locations.lon[i]) + '\n';
  }
  write_text_file(path, text);
}

void write_weather(const std::filesystem::path& path, const WeatherTable& weather) {
  std::string text = "timestamp";
  for (const auto& c : weather.columns) text += ',' + c;
  text += ",state\n";
  for (const WeatherRow& row : weather.rows) {
    text += format_timestamp(row.time);
    for (double v : row.values) text += ',' + format_double(v);
    text += ',' + row.state + '\n';
  }
  write_text_file(path, text);
}

void write_holidays(const std::filesystem::path& path, const std::map<Date, bool>& holidays) {
  std::string text = "date,is_holiday\n";
  for (const auto& [d, flag] : holidays) text += format_date(d) + (flag ? ",1\n" : ",0\n");
  write_text_file(path, text);
}

void write_pois(const std::filesystem::path& path, const std::vector<PoiRecord>& pois) {
  std::string text = "location_id,category,count\n";
  for (const PoiRecord& p : pois) text += p.location_id + ',' + p.category + ',' + format_double(p.count) + '\n';
  write_text_file(path, text);
}

void write_flow_cache(const std::filesystem::path& path, const FlowSeries& series,
                      const std::vector<std::string>& location_ids) {
  if (location_ids.size() != series.locations()) throw DataError("flow cache: location ids do not match series width");
  std::string text = "timestamp";
  for (const auto& id : location_ids) text += ',' + id;
  text += '\n';
  for (std::size_t t = 0; t < series.steps(); ++t) {
    text += format_timestamp(series.time_at(t));
    for (std::size_t n = 0; n < series.locations(); ++n) text += ',' + format_double(series.values.at(t, n));
    text += '\n';
  }
  write_text_file(path, text);
}

FlowCache read_flow_cache(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  if (table.header.empty() || table.header[0] != "timestamp") throw DataError(table.source + ": first column must be timestamp");
  if (table.rows.size() < 2) throw DataError(table.source + ": need at least two intervals to infer the interval");
  FlowCache out;
  out.location_ids.assign(table.header.begin() + 1, table.header.end());
  const std::size_t steps = table.rows.size(), width = out.location_ids.size();
  out.series.start = require_time(table, 0, 0);
  const auto second = require_time(table, 1, 0);
  out.series.interval_minutes = static_cast<int>((second - out.series.start).count() / 60);
  if (!valid_interval(out.series.interval_minutes)) table.fail(1, "interval must be 30, 60 or 120 minutes");
  out.series.values = ad::Tensor({steps, width});
  for (std::size_t t = 0; t < steps; ++t) {
    if (require_time(table, t, 0) != out.series.time_at(t)) table.fail(t, "timestamps must advance by one interval");
    for (std::size_t n = 0; n < width; ++n) {
      const double v = parse_double(table, t, n + 1);
      if (v < 0.0) table.fail(t, "flow values must be non-negative");
      out.series.values.at(t, n) = v;
    }
  }
  return out;
}

}  // namespace ctxbench::data
