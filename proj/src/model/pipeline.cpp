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

#include "ctxbench/model/pipeline.hpp"

#include <algorithm>
#include <cstring>
#include <string>

namespace ctxbench::model {

using ad::Var;

ad::Tensor context_in_time_order(const ad::Tensor& context, std::span<const std::size_t> order, bool newest_only) {
  const std::size_t rows = context.dim(1), f = context.dim(2), block = rows * f;
  const std::size_t first = newest_only ? order.size() - 1 : 0;
  ad::Tensor out({order.size() - first, rows, f});
  for (std::size_t k = first; k < order.size(); ++k) {
    std::copy_n(context.data().begin() + static_cast<std::ptrdiff_t>(order[k] * block), block,
                out.data().begin() + static_cast<std::ptrdiff_t>((k - first) * block));
  }
  return out;
}

Model::Model(const ModelConfig& config, std::uint64_t seed) : config_(config), store_(seed) {
  const FusionSpec& fs = config_.fusion;
  const std::size_t f = context_width();
  time_order_ = config_.window.time_order();

  std::size_t input_dim = 1;
  if (fs.stage == Stage::early_concat) input_dim = 1 + f;
  if (fs.stage == Stage::early_add) {
    input_dim = fs.early_add_dim ? fs.early_add_dim : 1 + f;
    early_we_ = store_.weight("early.w_e", f, input_dim);
    early_wst_ = store_.weight("early.w_st", 1, input_dim);
    early_be_ = store_.bias("early.b_e", input_dim);
  }
  backbone_ = BackboneParams::create(store_, config_.window, config_.backbone, input_dim, config_.graphs);
  const std::size_t d1 = config_.backbone.embedding;
  std::size_t head_in = d1;

  if (fs.stage == Stage::late) {
    switch (fs.representation) {
      case Representation::raw:
        d4_ = f;
        break;
      case Representation::embed:
        d4_ = fs.embed_dim;
        embed_w_ = store_.weight("repr.embed.w", f, d4_);
        embed_b_ = store_.bias("repr.embed.b", d4_);
        context_biases_.push_back(embed_b_);
        break;
      case Representation::multi_embed: {
        static const enc::Family kOrder[4] = {enc::Family::weather, enc::Family::holiday, enc::Family::temporal_position,
                                               enc::Family::poi};
        for (std::size_t k = 0; k < 4; ++k) {
          const auto& cols = config_.context;
          const auto first = std::find_if(cols.begin(), cols.end(), [&](const enc::Column& c) { return c.family == kOrder[k]; });
          if (first == cols.end()) continue;
          const auto last = std::find_if(first, cols.end(), [&](const enc::Column& c) { return c.family != kOrder[k]; });
          if (std::any_of(last, cols.end(), [&](const enc::Column& c) { return c.family == kOrder[k]; })) {
            throw std::invalid_argument("context manifest: columns of one family must be contiguous");
          }
          FamilyEmbedding fe;
          fe.family = kOrder[k];
          fe.begin = static_cast<std::size_t>(first - cols.begin());
          fe.end = static_cast<std::size_t>(last - cols.begin());
          const std::string prefix = "repr.multi." + std::string(enc::family_name(kOrder[k]));
          fe.w = store_.weight(prefix + ".w", fe.end - fe.begin, fs.family_dims[k]);
          fe.b = store_.bias(prefix + ".b", fs.family_dims[k]);
          context_biases_.push_back(fe.b);
          d4_ += fs.family_dims[k];
          families_.push_back(fe);
        }
        break;
      }
      case Representation::lstm:
        d4_ = fs.lstm_hidden;
        lstm_ = LstmWeights::create(store_, "repr.lstm", f, d4_);
        context_biases_.push_back(lstm_.b);
        break;
    }
    switch (fs.fusion) {
      case FusionOp::concat:
        head_in = d1 + d4_;
        break;
      case FusionOp::add: {
        const std::size_t d5 = fs.add_dim ? fs.add_dim : d1;
        add_wst_ = store_.weight("fuse.add.w_st", d1, d5);
        add_we_ = store_.weight("fuse.add.w_e", d4_, d5);
        add_b1_ = store_.bias("fuse.add.b1", d5);
        head_in = d5;
        break;
      }
      case FusionOp::gating:
        gate_w_ = store_.weight("fuse.gate.w_g", d4_, d1);
        gate_b2_ = store_.bias("fuse.gate.b2", d1);
        context_biases_.push_back(gate_b2_);
        break;
    }
  }
  head_ = OutputHead::create(store_, head_in);
}

Var Model::backbone_input(const Batch& batch) const {
  const Var flow = Var::constant(batch.flow);
  switch (config_.fusion.stage) {
    case Stage::early_concat: return early_concat(Var::constant(batch.context), flow);
    case Stage::early_add: return early_add(Var::constant(batch.context), flow, early_we_, early_wst_, early_be_);
    default: return flow;
  }
}

Var Model::backbone_embedding(const Batch& batch, std::span<const ad::Tensor* const> graphs) const {
  if (uses_context() && batch.context.dim(2) != context_width()) {
    throw ad::ShapeError("batch has " + std::to_string(batch.context.dim(2)) + " context columns, model expects " +
                         std::to_string(context_width()));
  }
  return backbone_forward(backbone_input(batch), graphs, backbone_, config_.window);
}

Var Model::context_embedding(const Batch& batch) const {
  const FusionSpec& fs = config_.fusion;
  if (fs.stage != Stage::late) throw std::logic_error("context_embedding is defined for late techniques only");
  const bool newest_only = fs.representation != Representation::lstm;
  const Var window = Var::constant(context_in_time_order(batch.context, time_order_, newest_only));
  switch (fs.representation) {
    case Representation::raw: return repr_raw(window);
    case Representation::embed: return repr_embed(repr_raw(window), embed_w_, embed_b_);
    case Representation::multi_embed: return repr_multi_embed(repr_raw(window), families_);
    case Representation::lstm: {
      // POI columns follow the temporal ones in the merged context.
      const auto poi = std::find_if(config_.context.begin(), config_.context.end(),
                                    [](const enc::Column& c) { return c.family == enc::Family::poi; });
      const auto temporal = static_cast<std::size_t>(poi - config_.context.begin());
      if (is_replicated(window.value(), batch.nodes, temporal)) {
        return repr_lstm_projected(lstm_replicated_projection(window.value(), batch.nodes, temporal, lstm_),
                                   window.shape()[0], lstm_);
      }
      return repr_lstm(window, lstm_);
    }
  }
  return {};
}

Var Model::fused_embedding(const Batch& batch, std::span<const ad::Tensor* const> graphs) const {
  const Var x_emb = backbone_embedding(batch, graphs);
  const FusionSpec& fs = config_.fusion;
  if (fs.stage != Stage::late) return x_emb;
  const Var e_emb = context_embedding(batch);
  switch (fs.fusion) {
    case FusionOp::concat: return fuse_concat(x_emb, e_emb);
    case FusionOp::add: return fuse_add(x_emb, e_emb, add_wst_, add_we_, add_b1_);
    case FusionOp::gating: return fuse_gating(x_emb, e_emb, gate_w_, gate_b2_, fs.outer_sigmoid);
  }
  return {};
}

Var Model::forward(const Batch& batch, std::span<const ad::Tensor* const> graphs) const {
  return head_(fused_embedding(batch, graphs));
}

}  // namespace ctxbench::model
