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

#include "ctxbench/bench/experiment.hpp"

#include <algorithm>

#include "ctxbench/core/random.hpp"

namespace ctxbench::bench {

model::FusionSpec resolve_technique(const std::string& technique, const model::FusionSpec& defaults) {
  const model::FusionSpec parsed = model::FusionSpec::parse(technique);
  model::FusionSpec out = defaults;
  out.stage = parsed.stage;
  out.representation = parsed.representation;
  out.fusion = parsed.fusion;
  if (technique.find('@') != std::string::npos) {
    out.embed_dim = parsed.embed_dim;
    out.family_dims = parsed.family_dims;
    out.lstm_hidden = parsed.lstm_hidden;
  }
  return out;
}

PreparedDataset::PreparedDataset(data::Dataset dataset, const ExperimentSettings& settings)
    : dataset_(std::move(dataset)), encoding_(settings.encoding), window_(settings.window) {
  const data::FlowSeries& series = dataset_.flow;
  series.validate();
  window_.interval_minutes = series.interval_minutes;
  const std::size_t steps = series.steps(), n = series.locations();
  split_ = data::chronological_split(steps, settings.split, window_.first_valid_index());

  // Per-location scale: maximum over the training rows (1 for an all-zero location).
  scale_.assign(n, 0.0);
  for (std::size_t t = split_.train.begin; t < split_.train.end; ++t)
    for (std::size_t i = 0; i < n; ++i) scale_[i] = std::max(scale_[i], series.values.at(t, i));
  for (double& s : scale_)
    if (s <= 0.0) s = 1.0;
  flow_ = ad::Tensor({steps, n});
  for (std::size_t t = 0; t < steps; ++t)
    for (std::size_t i = 0; i < n; ++i) flow_.at(t, i) = series.values.at(t, i) / scale_[i];

  if (settings.graphs.distance) {
    graphs_.push_back(graph::build_distance_graph(dataset_.locations, settings.graphs.distance_threshold_m,
                                                  settings.graphs.metric));
  }
  if (settings.graphs.correlation) {
    ad::Tensor train_rows({split_.train.size(), n});
    for (std::size_t t = 0; t < split_.train.size(); ++t)
      for (std::size_t i = 0; i < n; ++i) train_rows.at(t, i) = series.values.at(t, i);
    graphs_.push_back(graph::build_correlation_graph(train_rows, settings.graphs.correlation_threshold));
  }
  if (graphs_.empty()) throw std::invalid_argument("at least one graph (distance or correlation) must be enabled");

  train_ = model::window_samples(steps, window_, split_.train).targets;
  validation_ = model::window_samples(steps, window_, split_.validation).targets;
  test_ = model::window_samples(steps, window_, split_.test).targets;
}

std::shared_ptr<const enc::ContextBundle> PreparedDataset::context(const enc::FeatureSet& features) const {
  const std::string key = features.label();
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = contexts_.find(key); it != contexts_.end()) return it->second;
  }
  auto built = std::make_shared<const enc::ContextBundle>(enc::build_context(dataset_, features, split_.train, encoding_));
  std::lock_guard<std::mutex> lock(mutex_);
  return contexts_.emplace(key, std::move(built)).first->second;
}

train::Problem PreparedDataset::problem(const enc::ContextBundle* context) const {
  train::Problem p;
  p.flow = &flow_;
  p.context = context;
  for (const auto& g : graphs_) p.graphs.push_back(&g.propagation);
  p.window = window_;
  p.scale = scale_;
  p.train = train_;
  p.validation = validation_;
  return p;
}

model::ModelConfig model_config(const PreparedDataset& prepared, const enc::ContextBundle& context,
                                const model::FusionSpec& fusion, const ExperimentSettings& settings) {
  model::ModelConfig mc;
  mc.window = prepared.window();
  mc.backbone = settings.backbone;
  mc.fusion = fusion;
  mc.graphs = prepared.graphs().size();
  mc.context = context.manifest();
  return mc;
}

CellResult run_cell(const PreparedDataset& prepared, const CellSpec& cell, const ExperimentSettings& settings) {
  const model::FusionSpec fusion = resolve_technique(cell.technique, settings.fusion);
  const enc::FeatureSet features =
      fusion.uses_context() ? enc::FeatureSet::parse(cell.features) : enc::FeatureSet{};
  const auto context = prepared.context(features);
  model::Model model(model_config(prepared, *context, fusion, settings), derive_seed(cell.seed, 1));
  const train::Problem problem = prepared.problem(context.get());
  train::TrainConfig tc = settings.train;
  tc.seed = derive_seed(cell.seed, 2);
  CellResult out;
  out.history = train::train(model, problem, tc);
  const train::Evaluation ev = train::evaluate(model, problem, prepared.test_targets());
  out.rmse = ev.rmse;
  out.mae = ev.mae;
  out.train_seconds = out.history.seconds;
  out.epochs_run = out.history.epochs_run;
  return out;
}

}  // namespace ctxbench::bench
