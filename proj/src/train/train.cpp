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

#include "ctxbench/train/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ctxbench/autodiff/optim.hpp"
#include "ctxbench/core/random.hpp"

namespace ctxbench::train {

ad::Var mse_loss(const ad::Var& prediction, const ad::Var& target) { return ad::mse(prediction, target); }

namespace {

void require_pair(std::span<const double> y, std::span<const double> y_hat, const char* what) {
  if (y.size() != y_hat.size()) throw std::invalid_argument(std::string(what) + ": length mismatch");
  if (y.empty()) throw std::invalid_argument(std::string(what) + ": empty input");
}

}  // namespace

double rmse(std::span<const double> y, std::span<const double> y_hat) {
  require_pair(y, y_hat, "rmse");
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) ss += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
  return std::sqrt(ss / static_cast<double>(y.size()));
}

double mae(std::span<const double> y, std::span<const double> y_hat) {
  require_pair(y, y_hat, "mae");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - y_hat[i]);
  return s / static_cast<double>(y.size());
}

std::vector<double> avg_normalized(const std::vector<std::vector<double>>& matrix) {
  if (matrix.empty()) throw std::invalid_argument("avg_normalized: no methods");
  const std::size_t datasets = matrix[0].size();
  if (datasets == 0) throw std::invalid_argument("avg_normalized: no datasets");
  std::vector<double> minima(datasets, std::numeric_limits<double>::infinity());
  for (const auto& row : matrix) {
    if (row.size() != datasets) throw std::invalid_argument("avg_normalized: ragged matrix");
    for (std::size_t d = 0; d < datasets; ++d) {
      if (!(row[d] > 0.0) || !std::isfinite(row[d])) {
        throw std::invalid_argument("avg_normalized: entries must be positive and finite, got " + std::to_string(row[d]));
      }
      minima[d] = std::min(minima[d], row[d]);
    }
  }
  std::vector<double> out;
  out.reserve(matrix.size());
  for (const auto& row : matrix) {
    double s = 0.0;
    for (std::size_t d = 0; d < datasets; ++d) s += row[d] / minima[d];
    out.push_back(s / static_cast<double>(datasets));
  }
  return out;
}

Evaluation evaluate(const model::Model& model, const Problem& problem, std::span<const std::size_t> targets,
                    std::size_t batch_size) {
  const std::size_t n = problem.flow->dim(1);
  Evaluation ev;
  ev.prediction = ad::Tensor({targets.size(), n});
  ev.truth = ad::Tensor({targets.size(), n});
  const enc::ContextBundle* ctx = model.uses_context() ? problem.context : nullptr;
  for (std::size_t start = 0; start < targets.size(); start += batch_size) {
    const auto chunk = targets.subspan(start, std::min(batch_size, targets.size() - start));
    const model::Batch batch = model::make_batch(*problem.flow, ctx, problem.window, chunk);
    const ad::Tensor pred = model.forward(batch, problem.graphs).value();
    const std::size_t b = chunk.size();
    for (std::size_t s = 0; s < chunk.size(); ++s)
      for (std::size_t i = 0; i < n; ++i) {
        ev.prediction.at(start + s, i) = pred[i * b + s] * problem.scale[i];
        ev.truth.at(start + s, i) = batch.target[i * b + s] * problem.scale[i];
      }
  }
  ev.rmse = rmse(ev.truth.data(), ev.prediction.data());
  ev.mae = mae(ev.truth.data(), ev.prediction.data());
  return ev;
}

TrainResult train(model::Model& model, const Problem& problem, const TrainConfig& config) {
  if (problem.train.empty() || problem.validation.empty()) {
    throw std::invalid_argument("train: need at least one training and one validation sample");
  }
  if (config.batch_size == 0 || config.max_epochs == 0) throw std::invalid_argument("train: batch size and epochs must be positive");
  if (!(config.learning_rate >= 0.0)) throw std::invalid_argument("train: learning rate must be non-negative");
  const auto started = std::chrono::steady_clock::now();

  ad::Adam optimizer(model.params().all(), {.learning_rate = config.learning_rate});
  const enc::ContextBundle* ctx = model.uses_context() ? problem.context : nullptr;
  std::vector<std::size_t> order = problem.train;
  Rng shuffle_rng(derive_seed(config.seed, 0x5eed));

  TrainResult result;
  double best = std::numeric_limits<double>::infinity();
  std::vector<ad::Tensor> best_params = model.params().snapshot();
  std::size_t since_best = 0;

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    // Fisher-Yates with the raw engine output, so the order does not depend on the
    // standard library's distribution implementation.
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.next() % i]);
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      const std::span<const std::size_t> chunk(order.data() + start, std::min(config.batch_size, order.size() - start));
      const model::Batch batch = model::make_batch(*problem.flow, ctx, problem.window, chunk);
      try {
        optimizer.zero_grad();
        const ad::Var loss = mse_loss(model.forward(batch, problem.graphs), ad::Var::constant(batch.target));
        ad::backward(loss);
        loss_sum += loss.value().item() * static_cast<double>(chunk.size());
        optimizer.step();
      } catch (const ad::NumericError& e) {
        throw TrainingError("non-finite value at epoch " + std::to_string(epoch + 1) + ", batch " +
                            std::to_string(batch_index + 1) + " (max |grad| " + std::to_string(optimizer.max_abs_grad()) +
                            "): " + e.what());
      }
    }
    result.train_loss.push_back(loss_sum / static_cast<double>(order.size()));
    const double val = evaluate(model, problem, problem.validation, std::max<std::size_t>(config.batch_size, 64)).rmse;
    result.val_rmse.push_back(val);
    result.epochs_run = epoch + 1;
    if (val < best) {
      best = val;
      result.best_epoch = epoch;
      best_params = model.params().snapshot();
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  model.params().restore(best_params);
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace ctxbench::train
