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

#include "ctxbench/encoding/context.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "ctxbench/data/csv.hpp"
#include "ctxbench/data/ingest.hpp"

namespace ctxbench::enc {

using data::DataError;

std::string_view family_name(Family f) {
  switch (f) {
    case Family::weather: return "Wea";
    case Family::holiday: return "Holi";
    case Family::temporal_position: return "TP";
    case Family::poi: return "POIs";
  }
  return "?";
}

FeatureSet FeatureSet::parse(std::string_view text) {
  if (text == "All") return all();
  if (text == "None" || text == "NoContext") return {};
  FeatureSet out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t dash = std::min(text.find('-', pos), text.size());
    const std::string_view tok = text.substr(pos, dash - pos);
    bool* flag = tok == "Wea" ? &out.weather : tok == "Holi" ? &out.holiday : tok == "TP" ? &out.temporal_position
               : tok == "POIs" ? &out.pois : nullptr;
    if (!flag) throw std::invalid_argument("unknown feature family '" + std::string(tok) + "' in '" + std::string(text) + "'");
    if (*flag) throw std::invalid_argument("feature family '" + std::string(tok) + "' repeated in '" + std::string(text) + "'");
    *flag = true;
    pos = dash + 1;
  }
  return out;
}

bool FeatureSet::has(Family f) const {
  switch (f) {
    case Family::weather: return weather;
    case Family::holiday: return holiday;
    case Family::temporal_position: return temporal_position;
    case Family::poi: return pois;
  }
  return false;
}

std::string FeatureSet::label() const {
  if (empty()) return "None";
  if (*this == all()) return "All";
  std::string out;
  for (Family f : {Family::weather, Family::holiday, Family::temporal_position, Family::poi}) {
    if (!has(f)) continue;
    if (!out.empty()) out += '-';
    out += family_name(f);
  }
  return out;
}

std::size_t family_width(const Manifest& manifest, Family f) {
  return static_cast<std::size_t>(std::count_if(manifest.begin(), manifest.end(), [&](const Column& c) { return c.family == f; }));
}

TemporalContext encode_temporal_position(std::span<const data::TimePoint> times, int interval_minutes) {
  if (!data::valid_interval(interval_minutes)) throw DataError("interval must be 30, 60 or 120 minutes");
  const std::size_t slots = static_cast<std::size_t>(1440 / interval_minutes);
  TemporalContext out;
  out.values = ad::Tensor({times.size(), slots + 7});
  for (std::size_t t = 0; t < times.size(); ++t) {
    const int minute = data::minute_of_day(times[t]);
    if (minute % interval_minutes != 0 || (times[t].time_since_epoch().count() % 60) != 0) {
      throw DataError("timestamp " + data::format_timestamp(times[t]) + " is not aligned to " +
                      std::to_string(interval_minutes) + "-minute slots");
    }
    out.values.at(t, static_cast<std::size_t>(minute / interval_minutes)) = 1.0;
    out.values.at(t, slots + static_cast<std::size_t>(data::day_of_week(times[t]))) = 1.0;
  }
  for (std::size_t s = 0; s < slots; ++s) out.manifest.push_back({Family::temporal_position, "slot_" + std::to_string(s)});
  static const char* const kDays[] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
  for (const char* d : kDays) out.manifest.push_back({Family::temporal_position, std::string("dow_") + d});
  return out;
}

bool is_bad_weather(std::string_view state) {
  std::string s(state);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const char* bad : {"rain", "snow", "storm", "thunder", "drizzle", "sleet", "hail", "shower", "fog", "mist", "haze",
                          "dust", "sand", "smoke", "squall", "tornado", "ice", "freezing"}) {
    if (s.find(bad) != std::string::npos) return true;
  }
  return false;
}

WeatherEncoder WeatherEncoder::fit(const data::WeatherTable& aligned, data::IndexRange train, StateEncoding encoding) {
  if (train.end > aligned.rows.size() || train.size() == 0) throw DataError("weather encoder: invalid training range");
  WeatherEncoder enc;
  enc.numeric_columns = aligned.columns;
  enc.state_encoding = encoding;
  const std::size_t k = aligned.columns.size();
  enc.mean.assign(k, 0.0);
  enc.stddev.assign(k, 0.0);
  const double n = static_cast<double>(train.size());
  std::set<std::string> vocab;
  for (std::size_t t = train.begin; t < train.end; ++t) {
    for (std::size_t c = 0; c < k; ++c) enc.mean[c] += aligned.rows[t].values[c] / n;
    vocab.insert(aligned.rows[t].state);
  }
  for (std::size_t c = 0; c < k; ++c) {
    double ss = 0.0;
    for (std::size_t t = train.begin; t < train.end; ++t) {
      const double d = aligned.rows[t].values[c] - enc.mean[c];
      ss += d * d;
    }
    const double sd = std::sqrt(ss / n);
    // Relative cutoff: a column that only varies by rounding noise counts as constant.
    enc.stddev[c] = sd > 1e-12 * std::max(1.0, std::abs(enc.mean[c])) ? sd : 0.0;
  }
  enc.states.assign(vocab.begin(), vocab.end());
  return enc;
}

TemporalContext WeatherEncoder::encode(const data::WeatherTable& aligned) const {
  if (aligned.columns != numeric_columns) throw DataError("weather encoder: column set differs from the fitted one");
  const std::size_t k = numeric_columns.size();
  const std::size_t state_width = state_encoding == StateEncoding::one_hot ? states.size() + 1 : 2;
  TemporalContext out;
  out.values = ad::Tensor({aligned.rows.size(), k + state_width});
  std::unordered_map<std::string, std::size_t> state_index;
  for (std::size_t i = 0; i < states.size(); ++i) state_index.emplace(states[i], i);
  for (std::size_t t = 0; t < aligned.rows.size(); ++t) {
    const data::WeatherRow& row = aligned.rows[t];
    for (std::size_t c = 0; c < k; ++c) {
      out.values.at(t, c) = stddev[c] > 0.0 ? (row.values[c] - mean[c]) / stddev[c] : 0.0;
    }
    if (state_encoding == StateEncoding::one_hot) {
      const auto it = state_index.find(row.state);
      out.values.at(t, k + (it == state_index.end() ? states.size() : it->second)) = 1.0;
    } else {
      out.values.at(t, k + (is_bad_weather(row.state) ? 1 : 0)) = 1.0;
    }
  }
  for (const auto& c : numeric_columns) out.manifest.push_back({Family::weather, c});
  if (state_encoding == StateEncoding::one_hot) {
    for (const auto& s : states) out.manifest.push_back({Family::weather, "state=" + s});
    out.manifest.push_back({Family::weather, "state=unknown"});
  } else {
    out.manifest.push_back({Family::weather, "state=good"});
    out.manifest.push_back({Family::weather, "state=bad"});
  }
  return out;
}

TemporalContext encode_holiday(std::span<const data::TimePoint> times, const std::map<data::Date, bool>& holidays) {
  TemporalContext out;
  out.values = ad::Tensor({times.size(), 1});
  std::set<data::Date> missing;
  for (std::size_t t = 0; t < times.size(); ++t) {
    const auto it = holidays.find(data::date_of(times[t]));
    if (it == holidays.end()) {
      missing.insert(data::date_of(times[t]));
      continue;
    }
    out.values.at(t, 0) = it->second ? 1.0 : 0.0;
  }
  if (!missing.empty()) {
    std::string msg = "holiday table is missing " + std::to_string(missing.size()) + " date(s):";
    std::size_t shown = 0;
    for (const auto& d : missing) {
      if (shown++ == 10) {
        msg += " ...";
        break;
      }
      msg += ' ' + data::format_date(d);
    }
    throw DataError(msg);
  }
  out.manifest.push_back({Family::holiday, "is_holiday"});
  return out;
}

SpatialContext encode_pois_density(std::span<const data::PoiRecord> pois, const data::LocationSet& locations) {
  const auto index = locations.index();
  std::set<std::string> categories;
  std::set<std::string> unknown;
  for (const auto& p : pois) {
    if (!index.count(p.location_id)) unknown.insert(p.location_id);
    categories.insert(p.category);
  }
  if (!unknown.empty()) throw DataError("POI table references unknown location '" + *unknown.begin() + "'");
  const std::vector<std::string> cats(categories.begin(), categories.end());
  SpatialContext out;
  out.values = ad::Tensor({locations.size(), cats.size()});
  for (const auto& p : pois) {
    const auto c = static_cast<std::size_t>(std::lower_bound(cats.begin(), cats.end(), p.category) - cats.begin());
    out.values.at(index.at(p.location_id), c) += p.count;
  }
  for (const auto& c : cats) out.manifest.push_back({Family::poi, c});
  return out;
}

SpatialContext encode_pois_tfidf(std::span<const data::PoiRecord> pois, const data::LocationSet& locations) {
  SpatialContext out = encode_pois_density(pois, locations);
  const std::size_t n = out.values.dim(0), c = out.values.dim(1);
  std::vector<double> idf(c, 0.0);
  for (std::size_t j = 0; j < c; ++j) {
    std::size_t df = 0;
    for (std::size_t i = 0; i < n; ++i) df += out.values.at(i, j) > 0.0;
    idf[j] = df > 0 ? std::log(static_cast<double>(n) / static_cast<double>(df)) : 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < c; ++j) total += out.values.at(i, j);
    for (std::size_t j = 0; j < c; ++j) out.values.at(i, j) = total > 0.0 ? out.values.at(i, j) / total * idf[j] : 0.0;
  }
  return out;
}

ad::Tensor replicate_and_merge(const ad::Tensor& temporal_window, const ad::Tensor& spatial) {
  if (temporal_window.rank() != 2 || spatial.rank() != 2) throw ad::ShapeError("replicate_and_merge expects two matrices");
  const std::size_t p = temporal_window.dim(0), et = temporal_window.dim(1);
  const std::size_t n = spatial.dim(0), es = spatial.dim(1);
  ad::Tensor out({p, n, et + es});
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < et; ++k) out.at(i, j, k) = temporal_window.at(i, k);
      for (std::size_t k = 0; k < es; ++k) out.at(i, j, et + k) = spatial.at(j, k);
    }
  }
  return out;
}

Manifest ContextBundle::manifest() const {
  Manifest out = temporal.manifest;
  out.insert(out.end(), spatial.manifest.begin(), spatial.manifest.end());
  return out;
}

namespace {

void append_columns(TemporalContext& dst, const TemporalContext& src) {
  const std::size_t t = src.values.dim(0), a = dst.values.dim(1), b = src.values.dim(1);
  ad::Tensor merged({t, a + b});
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < a; ++j) merged.at(i, j) = dst.values.at(i, j);
    for (std::size_t j = 0; j < b; ++j) merged.at(i, a + j) = src.values.at(i, j);
  }
  dst.values = std::move(merged);
  dst.manifest.insert(dst.manifest.end(), src.manifest.begin(), src.manifest.end());
}

}  // namespace

ContextBundle build_context(const data::Dataset& dataset, const FeatureSet& features, data::IndexRange train,
                            const EncodingConfig& config) {
  const data::FlowSeries& flow = dataset.flow;
  const std::size_t steps = flow.steps();
  std::vector<data::TimePoint> times(steps);
  for (std::size_t t = 0; t < steps; ++t) times[t] = flow.time_at(t);

  ContextBundle out;
  out.features = features;
  out.temporal.values = ad::Tensor({steps, 0});
  out.spatial.values = ad::Tensor({flow.locations(), 0});

  if (features.weather) {
    if (dataset.context.weather.rows.empty()) throw DataError("weather features requested but the weather table is empty");
    const auto aligned = data::align_weather(dataset.context.weather, flow.start, steps, flow.interval_minutes);
    out.weather_gaps_filled = aligned.filled_gaps;
    const auto encoder = WeatherEncoder::fit(aligned.table, train, config.weather_state);
    append_columns(out.temporal, encoder.encode(aligned.table));
  }
  if (features.holiday) append_columns(out.temporal, encode_holiday(times, dataset.context.holidays));
  if (features.temporal_position) append_columns(out.temporal, encode_temporal_position(times, flow.interval_minutes));
  if (features.pois) {
    out.spatial = config.poi == PoiEncoding::density ? encode_pois_density(dataset.context.pois, dataset.locations)
                                                     : encode_pois_tfidf(dataset.context.pois, dataset.locations);
    if (out.spatial.values.dim(1) == 0) throw DataError("POI features requested but the POI table is empty");
    if (config.scale_pois) {
      const std::size_t n = out.spatial.values.dim(0);
      for (std::size_t j = 0; j < out.spatial.values.dim(1); ++j) {
        double mx = 0.0;
        for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, out.spatial.values.at(i, j));
        if (mx > 0.0)
          for (std::size_t i = 0; i < n; ++i) out.spatial.values.at(i, j) /= mx;
      }
    }
  }
  return out;
}

}  // namespace ctxbench::enc
