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

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ctxbench/autodiff/var.hpp"

namespace ctxbench::ad {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Per-parameter first/second moment accumulators plus the shared step count.
struct AdamState {
  AdamConfig config;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::int64_t step = 0;
};

AdamState make_adam_state(std::span<const Tensor> params, AdamConfig config = {});

// One bias-corrected adaptive-moment update, in place.
void adam_step(AdamState& state, std::span<Tensor> params, std::span<const Tensor> grads);

// Convenience wrapper binding the state to a list of graph parameters.
class Adam {
 public:
  Adam(std::vector<Var> params, AdamConfig config = {});

  void zero_grad();
  void step();
  double max_abs_grad() const;
  const AdamState& state() const { return state_; }

 private:
  std::vector<Var> params_;
  AdamState state_;
};

// Max over parameter coordinates of |analytic - numeric| / max(floor, |analytic| + |numeric|),
// with numeric derivatives from central differences of step `epsilon`. The floor is
// max(1e-8, relative_floor * largest |analytic|), so a nonzero relative_floor stops
// coordinates far below the gradient scale from reporting pure round-off.
double grad_check(const std::function<Var()>& f, std::span<Var> params, double epsilon = 1e-6,
                  double relative_floor = 0.0);

}  // namespace ctxbench::ad
