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
#include <span>
#include <stdexcept>
#include <vector>

#include "ctxbench/model/pipeline.hpp"

namespace ctxbench::train {

ad::Var mse_loss(const ad::Var& prediction, const ad::Var& target);

// Pooled over every element; inputs in original flow units.
double rmse(std::span<const double> y, std::span<const double> y_hat);
double mae(std::span<const double> y, std::span<const double> y_hat);

// matrix[m][d] is the metric of method m on dataset d. For each method, the mean over
// datasets of value / (column minimum).
std::vector<double> avg_normalized(const std::vector<std::vector<double>>& matrix);

struct TrainConfig {
  std::size_t max_epochs = 200;
  std::size_t batch_size = 32;
  std::size_t patience = 10;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

// Everything a run needs besides the model. Flow is normalized per location; `scale`
// multiplies a normalized value back to flow units.
struct Problem {
  const ad::Tensor* flow = nullptr;  // T x N
  const enc::ContextBundle* context = nullptr;
  std::vector<const ad::Tensor*> graphs;
  model::WindowSpec window;
  std::vector<double> scale;  // per location
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

struct TrainResult {
  std::vector<double> train_loss;  // mean batch loss per epoch
  std::vector<double> val_rmse;    // per epoch, flow units
  std::size_t best_epoch = 0;      // 0-based
  std::size_t epochs_run = 0;
  double seconds = 0.0;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mini-batch Adam with early stopping on validation RMSE. The model ends up holding the
// parameters of the best validation epoch.
TrainResult train(model::Model& model, const Problem& problem, const TrainConfig& config);

// Denormalized predictions and targets, one row per target index, N columns.
struct Evaluation {
  ad::Tensor prediction;
  ad::Tensor truth;
  double rmse = 0.0;
  double mae = 0.0;
};
Evaluation evaluate(const model::Model& model, const Problem& problem, std::span<const std::size_t> targets,
                    std::size_t batch_size = 64);

}  // namespace ctxbench::train
