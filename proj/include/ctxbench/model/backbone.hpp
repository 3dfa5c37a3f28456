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

#include "ctxbench/autodiff/ops.hpp"
#include "ctxbench/model/params.hpp"
#include "ctxbench/model/window.hpp"

namespace ctxbench::model {

// Graph-convolutional GRU weights. Input projections for the update, reset and candidate
// gates are packed column-wise in wx and b; wh packs the update and reset hidden maps.
struct GruWeights {
  ad::Var wx;   // D' x 3H
  ad::Var wh;   // H x 2H
  ad::Var whc;  // H x H
  ad::Var b;    // 3H

  static GruWeights create(ParamStore& store, const std::string& prefix, std::size_t input_dim, std::size_t hidden);
  std::size_t hidden() const { return whc.shape()[0]; }
};

struct GateTrace {
  ad::Tensor update;
  ad::Tensor reset;
};

// One step over node-major rows (row i * k + s is node i of sample s, rows = N * k):
//   z = sig(AX Wxz + AH Whz + bz), r = sig(AX Wxr + AH Whr + br)
//   c = tanh(AX Wxc + A(r*H) Whc + bc), H' = z*H + (1-z)*c
ad::Var gconv_recurrent_step(const ad::Var& hidden, const ad::Var& input, const ad::Tensor& adj, const GruWeights& w,
                             GateTrace* trace = nullptr);

// Unrolls over steps x rows x D' inputs from a zero state and returns the final hidden state.
ad::Var gconv_recurrent_unroll(const ad::Var& inputs, const ad::Tensor& adj, const GruWeights& w);

enum class GraphAggregation { mean, weighted };

struct BackboneConfig {
  std::size_t hidden = 64;   // recurrent width
  std::size_t embedding = 64;  // D1
  GraphAggregation aggregation = GraphAggregation::mean;
};

struct BackboneParams {
  std::vector<std::vector<GruWeights>> cells;  // [branch][graph]
  std::vector<ad::Var> graph_weights;          // per branch, [graphs], weighted aggregation only
  ad::Var w_out;                               // (branches * H) x D1
  ad::Var b_out;                               // D1
  GraphAggregation aggregation = GraphAggregation::mean;

  static BackboneParams create(ParamStore& store, const WindowSpec& window, const BackboneConfig& config,
                               std::size_t input_dim, std::size_t graphs);
};

// inputs: P x BN x D'. Returns X_emb of shape BN x D1.
ad::Var backbone_forward(const ad::Var& inputs, std::span<const ad::Tensor* const> graphs, const BackboneParams& params,
                         const WindowSpec& window);

struct OutputHead {
  ad::Var w;  // Dout x 1
  ad::Var b;  // 1

  static OutputHead create(ParamStore& store, std::size_t input_dim);
  ad::Var operator()(const ad::Var& fused) const;
};

}  // namespace ctxbench::model
