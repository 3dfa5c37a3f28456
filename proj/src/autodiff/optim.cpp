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

#include "ctxbench/autodiff/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ctxbench::ad {

AdamState make_adam_state(std::span<const Tensor> params, AdamConfig config) {
  AdamState state;
  state.config = config;
  for (const Tensor& p : params) {
    state.first_moment.emplace_back(p.shape());
    state.second_moment.emplace_back(p.shape());
  }
  return state;
}

void adam_step(AdamState& state, std::span<Tensor> params, std::span<const Tensor> grads) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " params, " +
                     std::to_string(grads.size()) + " grads, " + std::to_string(state.first_moment.size()) +
                     " accumulators");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].shape() != grads[i].shape() || params[i].shape() != state.first_moment[i].shape()) {
      throw ShapeError("adam_step: parameter " + std::to_string(i) + " has shape " +
                       to_string(params[i].shape()) + " but gradient " + to_string(grads[i].shape()));
    }
  }
  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].data();
    auto g = grads[i].data();
    auto m = state.first_moment[i].data();
    auto v = state.second_moment[i].data();
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * g[j];
      v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      p[j] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

namespace {

std::vector<Tensor> values_of(const std::vector<Var>& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const Var& p : params) out.push_back(p.value());
  return out;
}

}  // namespace

Adam::Adam(std::vector<Var> params, AdamConfig config) : params_(std::move(params)) {
  state_ = make_adam_state(values_of(params_), config);
}

void Adam::zero_grad() {
  for (Var& p : params_) p.zero_grad();
}

void Adam::step() {
  // Update in place through the nodes so graph handles stay valid.
  std::vector<Tensor> grads;
  grads.reserve(params_.size());
  for (const Var& p : params_) grads.push_back(p.grad());
  std::vector<Tensor> values;
  values.reserve(params_.size());
  for (Var& p : params_) values.push_back(std::move(p.mutable_value()));
  adam_step(state_, values, grads);
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i].mutable_value() = std::move(values[i]);
}

double Adam::max_abs_grad() const {
  double best = 0.0;
  for (const Var& p : params_)
    for (double g : p.grad().data()) best = std::max(best, std::abs(g));
  return best;
}

double grad_check(const std::function<Var()>& f, std::span<Var> params, double epsilon, double relative_floor) {
  for (Var& p : params) p.zero_grad();
  const Var loss = f();
  backward(loss);
  double largest = 0.0;
  for (Var& p : params)
    for (double g : p.grad().data()) largest = std::max(largest, std::abs(g));
  const double floor = std::max(1e-8, relative_floor * largest);
  double worst = 0.0;
  for (Var& p : params) {
    const Tensor analytic = p.grad();
    auto values = p.mutable_value().data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      values[i] = original + epsilon;
      const double plus = f().value().item();
      values[i] = original - epsilon;
      const double minus = f().value().item();
      values[i] = original;
      if (!std::isfinite(plus) || !std::isfinite(minus)) {
        throw NumericError("grad_check: non-finite value under perturbation");
      }
      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double a = analytic[i];
      const double err = std::abs(a - numeric) / std::max(floor, std::abs(a) + std::abs(numeric));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace ctxbench::ad
