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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctxbench/autodiff/tensor.hpp"
#include "ctxbench/data/split.hpp"
#include "ctxbench/data/synth.hpp"
#include "ctxbench/data/types.hpp"

namespace ctxbench::enc {

enum class Family { weather, holiday, temporal_position, poi };

std::string_view family_name(Family f);

// Subset of the four context families, e.g. "Wea-Holi-TP-POIs", "Holi-TP", "All", "None".
struct FeatureSet {
  bool weather = false;
  bool holiday = false;
  bool temporal_position = false;
  bool pois = false;

  static FeatureSet parse(std::string_view text);
  static FeatureSet all() { return {true, true, true, true}; }
  // Canonical label in the order Wea, Holi, TP, POIs; "All" and "None" for the extremes.
  std::string label() const;
  bool empty() const { return !weather && !holiday && !temporal_position && !pois; }
  bool has(Family f) const;
  bool operator==(const FeatureSet&) const = default;
};

struct Column {
  Family family;
  std::string name;
};
using Manifest = std::vector<Column>;

std::size_t family_width(const Manifest& manifest, Family f);

struct TemporalContext {
  ad::Tensor values;  // T x Et
  Manifest manifest;
};

struct SpatialContext {
  ad::Tensor values;  // N x Es
  Manifest manifest;
};

TemporalContext encode_temporal_position(std::span<const data::TimePoint> times, int interval_minutes);

enum class StateEncoding { one_hot, good_bad };

// Statistics fitted on the training rows and applied verbatim to every row.
struct WeatherEncoder {
  std::vector<std::string> numeric_columns;
  std::vector<double> mean;
  std::vector<double> stddev;            // 0 marks a constant column, encoded as 0
  std::vector<std::string> states;       // sorted vocabulary seen in training
  StateEncoding state_encoding = StateEncoding::one_hot;

  static WeatherEncoder fit(const data::WeatherTable& aligned, data::IndexRange train,
                            StateEncoding encoding = StateEncoding::one_hot);
  TemporalContext encode(const data::WeatherTable& aligned) const;
};

bool is_bad_weather(std::string_view state);

TemporalContext encode_holiday(std::span<const data::TimePoint> times, const std::map<data::Date, bool>& holidays);

SpatialContext encode_pois_density(std::span<const data::PoiRecord> pois, const data::LocationSet& locations);
SpatialContext encode_pois_tfidf(std::span<const data::PoiRecord> pois, const data::LocationSet& locations);

// temporal_window: P x Et, spatial: N x Es -> P x N x (Et+Es).
ad::Tensor replicate_and_merge(const ad::Tensor& temporal_window, const ad::Tensor& spatial);

enum class PoiEncoding { density, tfidf };

struct EncodingConfig {
  PoiEncoding poi = PoiEncoding::density;
  StateEncoding weather_state = StateEncoding::one_hot;
  // Divide each POI column by its maximum over locations so every input is O(1).
  bool scale_pois = true;
};

// Encoded context for a whole dataset. Temporal columns come in the order weather, holiday,
// temporal position; spatial columns are the POI categories.
struct ContextBundle {
  TemporalContext temporal;
  SpatialContext spatial;
  FeatureSet features;
  std::size_t weather_gaps_filled = 0;

  std::size_t temporal_width() const { return temporal.values.dim(1); }
  std::size_t spatial_width() const { return spatial.values.dim(1); }
  std::size_t width() const { return temporal_width() + spatial_width(); }
  Manifest manifest() const;  // temporal columns followed by spatial columns
};

ContextBundle build_context(const data::Dataset& dataset, const FeatureSet& features, data::IndexRange train,
                            const EncodingConfig& config = {});

}  // namespace ctxbench::enc
