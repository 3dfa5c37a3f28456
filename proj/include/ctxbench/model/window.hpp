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
#include <span>
#include <vector>

#include "ctxbench/autodiff/tensor.hpp"
#include "ctxbench/data/split.hpp"
#include "ctxbench/encoding/context.hpp"

namespace ctxbench::model {

// Closeness, daily and weekly look-backs. A zero count switches that branch off.
struct WindowSpec {
  std::size_t closeness = 6;
  std::size_t daily = 7;
  std::size_t weekly = 4;
  int interval_minutes = 60;

  std::size_t steps() const { return closeness + daily + weekly; }  // P
  std::size_t slots_per_day() const { return static_cast<std::size_t>(1440 / interval_minutes); }
  // Lag of every window position in branch order closeness, daily, weekly; oldest first
  // inside each branch, so t - lag is the input time for target t.
  std::vector<std::size_t> lags() const;
  std::size_t first_valid_index() const;  // largest lag
  // Window positions from oldest to newest input time (stable for equal lags).
  std::vector<std::size_t> time_order() const;
};

struct WindowSamples {
  std::vector<std::size_t> targets;  // target indices with full history
  std::size_t skipped = 0;           // targets in range lacking history
};

// Throws when the range yields no sample.
WindowSamples window_samples(std::size_t series_steps, const WindowSpec& spec, data::IndexRange range);

// Inputs for a batch of B samples over N locations. Rows are node-major: row i * B + s holds
// location i of sample s, which lets graph propagation treat a step as one [N x B*d] matrix.
struct Batch {
  ad::Tensor flow;     // P x BN x 1
  ad::Tensor context;  // P x BN x F, temporal context replicated over locations then spatial
  ad::Tensor target;   // BN x 1
  std::size_t samples = 0;
  std::size_t nodes = 0;
};

// flow: T x N normalized series. context may be null (F = 0).
Batch make_batch(const ad::Tensor& flow, const enc::ContextBundle* context, const WindowSpec& spec,
                 std::span<const std::size_t> targets);

}  // namespace ctxbench::model
