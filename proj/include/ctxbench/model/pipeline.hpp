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
#include <vector>

#include "ctxbench/encoding/context.hpp"
#include "ctxbench/model/backbone.hpp"
#include "ctxbench/model/fusion.hpp"
#include "ctxbench/model/window.hpp"

namespace ctxbench::model {

struct ModelConfig {
  WindowSpec window;
  BackboneConfig backbone;
  FusionSpec fusion;
  std::size_t graphs = 1;
  enc::Manifest context;  // one entry per context column, temporal columns first
};

// An assembled technique: optional early-joint op, backbone, optional representation and
// late-fusion op, output head.
class Model {
 public:
  Model(const ModelConfig& config, std::uint64_t seed);

  // Predictions for every (sample, location) row, BN x 1.
  ad::Var forward(const Batch& batch, std::span<const ad::Tensor* const> graphs) const;
  // Input of the output head.
  ad::Var fused_embedding(const Batch& batch, std::span<const ad::Tensor* const> graphs) const;
  ad::Var backbone_embedding(const Batch& batch, std::span<const ad::Tensor* const> graphs) const;
  ad::Var context_embedding(const Batch& batch) const;  // late techniques only

  const ModelConfig& config() const { return config_; }
  ParamStore& params() { return store_; }
  const ParamStore& params() const { return store_; }
  std::size_t context_width() const { return config_.context.size(); }
  std::size_t context_embedding_width() const { return d4_; }
  bool uses_context() const { return config_.fusion.uses_context(); }
  // Context-path parameters (representation and fusion weights that touch the context,
  // plus their biases), for ablation checks.
  const std::vector<ad::Var>& context_biases() const { return context_biases_; }

 private:
  ad::Var backbone_input(const Batch& batch) const;

  ModelConfig config_;
  ParamStore store_;
  std::size_t d4_ = 0;

  ad::Var early_we_, early_wst_, early_be_;
  BackboneParams backbone_;
  ad::Var embed_w_, embed_b_;
  std::vector<FamilyEmbedding> families_;
  LstmWeights lstm_;
  ad::Var add_wst_, add_we_, add_b1_;
  ad::Var gate_w_, gate_b2_;
  OutputHead head_;
  std::vector<ad::Var> context_biases_;
  std::vector<std::size_t> time_order_;
};

// Context window reordered oldest-to-newest (all P steps or only the newest).
ad::Tensor context_in_time_order(const ad::Tensor& context, std::span<const std::size_t> order, bool newest_only);

}  // namespace ctxbench::model
