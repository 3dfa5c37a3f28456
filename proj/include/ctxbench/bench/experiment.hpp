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
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ctxbench/data/split.hpp"
#include "ctxbench/data/synth.hpp"
#include "ctxbench/encoding/context.hpp"
#include "ctxbench/graph/graphs.hpp"
#include "ctxbench/model/pipeline.hpp"
#include "ctxbench/train/train.hpp"

namespace ctxbench::bench {

struct GraphSettings {
  bool distance = true;
  bool correlation = true;
  double distance_threshold_m = 1000.0;
  double correlation_threshold = 0.0;
  graph::DistanceMetric metric = graph::DistanceMetric::haversine;
};

struct ExperimentSettings {
  model::WindowSpec window;  // interval is taken from the dataset
  model::BackboneConfig backbone;
  model::FusionSpec fusion;  // width defaults; stage and operators come from the technique name
  enc::EncodingConfig encoding;
  GraphSettings graphs;
  data::SplitSpec split;
  train::TrainConfig train;
};

// Applies a technique name on top of the configured fusion defaults.
model::FusionSpec resolve_technique(const std::string& technique, const model::FusionSpec& defaults);

// Technique-independent state of one dataset: normalized flow, split, graphs, samples.
class PreparedDataset {
 public:
  PreparedDataset(data::Dataset dataset, const ExperimentSettings& settings);

  const data::Dataset& dataset() const { return dataset_; }
  const ad::Tensor& normalized_flow() const { return flow_; }
  const std::vector<double>& scale() const { return scale_; }
  const data::SplitRanges& split() const { return split_; }
  const std::vector<graph::SpatialGraph>& graphs() const { return graphs_; }
  const model::WindowSpec& window() const { return window_; }
  const std::vector<std::size_t>& train_targets() const { return train_; }
  const std::vector<std::size_t>& validation_targets() const { return validation_; }
  const std::vector<std::size_t>& test_targets() const { return test_; }

  // Encoded context for a feature set; built once and shared (thread-safe).
  std::shared_ptr<const enc::ContextBundle> context(const enc::FeatureSet& features) const;

  train::Problem problem(const enc::ContextBundle* context) const;

 private:
  data::Dataset dataset_;
  enc::EncodingConfig encoding_;
  model::WindowSpec window_;
  ad::Tensor flow_;
  std::vector<double> scale_;
  data::SplitRanges split_;
  std::vector<graph::SpatialGraph> graphs_;
  std::vector<std::size_t> train_, validation_, test_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::shared_ptr<const enc::ContextBundle>> contexts_;
};

struct CellSpec {
  std::string technique;
  std::string features;
  std::uint64_t seed = 0;
};

struct CellResult {
  double rmse = 0.0;
  double mae = 0.0;
  double train_seconds = 0.0;
  std::size_t epochs_run = 0;
  train::TrainResult history;
};

CellResult run_cell(const PreparedDataset& prepared, const CellSpec& cell, const ExperimentSettings& settings);

model::ModelConfig model_config(const PreparedDataset& prepared, const enc::ContextBundle& context,
                                const model::FusionSpec& fusion, const ExperimentSettings& settings);

}  // namespace ctxbench::bench
