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

#include "ctxbench/autodiff/var.hpp"

namespace ctxbench::ad {

// How the right operand of a binary op is repeated to match the left one.
//   none:     shapes must be equal.
//   trailing: b's shape is a suffix of a's shape (e.g. a bias row over a matrix).
//   leading:  b's shape is a prefix of a's shape (e.g. a per-row scale).
// A rank-0 b is a suffix and a prefix of anything, i.e. a scalar broadcast.
enum class Broadcast { none, trailing, leading };

Var matmul(const Var& a, const Var& b);

Var add(const Var& a, const Var& b, Broadcast mode = Broadcast::none);
Var sub(const Var& a, const Var& b, Broadcast mode = Broadcast::none);
Var hadamard(const Var& a, const Var& b, Broadcast mode = Broadcast::none);

Var scale(const Var& x, double factor);
Var add_scalar(const Var& x, double offset);
// 1 - x, used by recurrent update gates.
Var one_minus(const Var& x);

Var sigmoid(const Var& x);
Var tanh(const Var& x);
Var relu(const Var& x);

Var concat(std::span<const Var> parts, std::size_t axis);
Var slice(const Var& x, std::size_t axis, std::size_t begin, std::size_t end);
Var reshape(const Var& x, Shape shape);

Var sum(const Var& x);
Var sum(const Var& x, std::size_t axis);
Var mean(const Var& x);
Var mean(const Var& x, std::size_t axis);

// First-order graph propagation with a constant [n x n] matrix. x is a stack of groups of
// `group_rows` rows (all rows when 0); inside a group rows are node-major, i.e. row
// i * k + s belongs to node i, so a group viewed as [n x (k * d)] is replaced by adj * group.
Var propagate(const Tensor& adj, const Var& x, std::size_t group_rows = 0);

// Fused pieces of one gated graph-recurrent step. `gates` stacks the [rows x 3H] input
// projections (update | reset | candidate) of every step and `step` picks rows
// [step * rows, (step + 1) * rows); hidden_proj is [rows x 2H] (update | reset).
//   gru_reset_hidden:  r * h,  r = sigmoid(gates_r + hidden_proj_r)
//   gru_update:        z * h + (1 - z) * tanh(gates_c + candidate_proj),  z = sigmoid(gates_z + hidden_proj_z)
Var gru_reset_hidden(const Var& gates, std::size_t step, const Var& hidden_proj, const Var& h);
Var gru_update(const Var& gates, std::size_t step, const Var& hidden_proj, const Var& candidate_proj, const Var& h);

// One LSTM step. `gates` stacks the [rows x 4H] input projections (input | forget | cell |
// output) of every step, hidden_proj is h_prev * Wh [rows x 4H], c is the previous cell state.
// Returns [rows x 2H] holding the new h and c side by side.
Var lstm_step(const Var& gates, std::size_t step, const Var& hidden_proj, const Var& c);

// Sum of a per-(step, sample) term and a per-node term laid out like a replicated window:
// per_sample is [steps * B x K], per_node is [nodes x K], and output row
// (p * nodes + i) * B + s equals per_sample[p * B + s] + per_node[i].
Var replicate_sum(const Var& per_sample, const Var& per_node, std::size_t steps);

// Mean squared difference; shapes must match.
Var mse(const Var& prediction, const Var& target);

// Scalar sigmoid for non-graph use.
double sigmoid(double x);

}  // namespace ctxbench::ad
