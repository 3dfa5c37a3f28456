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

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ctxbench/autodiff/ops.hpp"
#include "ctxbench/encoding/context.hpp"
#include "ctxbench/model/params.hpp"

namespace ctxbench::model {

enum class Stage { none, early_concat, early_add, late };
enum class Representation { raw, embed, multi_embed, lstm };
enum class FusionOp { concat, add, gating };

class UnknownTechnique : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FusionSpec {
  Stage stage = Stage::none;
  Representation representation = Representation::raw;
  FusionOp fusion = FusionOp::concat;

  std::size_t embed_dim = 16;
  // Per-family widths in the order weather, holiday, temporal position, POIs.
  std::array<std::size_t, 4> family_dims{8, 1, 8, 8};
  std::size_t lstm_hidden = 16;
  std::size_t early_add_dim = 0;  // D2; 0 means D + Et + Es
  std::size_t add_dim = 0;        // D5; 0 means D1
  bool outer_sigmoid = true;

  // Accepts the 14 technique names plus NoContext. A suffix overrides representation
  // widths for the embedding sweep: "Emb-Concat@32", "MultiEmb-Add@4-1-4-4", "LSTM-Gating@8".
  static FusionSpec parse(std::string_view name);
  std::string name() const;   // technique name without width suffix
  std::string label() const;  // name plus suffix when widths differ from the defaults
  bool uses_context() const { return stage != Stage::none; }
};

// The 14 technique names, early-joint first, then the late-fusion grid.
const std::vector<std::string>& technique_names();

// Stacks of P steps x rows x features.
ad::Var early_concat(const ad::Var& context, const ad::Var& flow);
ad::Var early_add(const ad::Var& context, const ad::Var& flow, const ad::Var& w_e, const ad::Var& w_st,
                  const ad::Var& b_e);

// Window given oldest-to-newest; returns the newest step as rows x F.
ad::Var repr_raw(const ad::Var& window);
ad::Var repr_embed(const ad::Var& last, const ad::Var& w, const ad::Var& b);

struct FamilyEmbedding {
  enc::Family family;
  std::size_t begin = 0, end = 0;  // column range in the context
  ad::Var w, b;
};
ad::Var repr_multi_embed(const ad::Var& last, const std::vector<FamilyEmbedding>& families);

struct LstmWeights {
  ad::Var wx;  // F x 4H, gate blocks input, forget, cell, output
  ad::Var wh;  // H x 4H
  ad::Var b;   // 4H
  static LstmWeights create(ParamStore& store, const std::string& prefix, std::size_t input_dim, std::size_t hidden);
  std::size_t hidden() const { return wh.shape()[0]; }
};
// Window oldest-to-newest; the same cell runs for every row; returns the final hidden state.
ad::Var repr_lstm(const ad::Var& window, const LstmWeights& w);
// The recurrence alone, from the stacked input projections [P * rows x 4H] (bias included).
ad::Var repr_lstm_projected(const ad::Var& xproj, std::size_t steps, const LstmWeights& w);

// True when a [P x (N * B) x F] window (rows node-major) repeats its first `temporal` columns
// across the N nodes and the remaining columns across the P steps, as replicate_and_merge does.
bool is_replicated(const ad::Tensor& window, std::size_t nodes, std::size_t temporal);
// window * wx + b for a replicated window, computed from its P * B temporal and N spatial
// distinct rows.
ad::Var lstm_replicated_projection(const ad::Tensor& window, std::size_t nodes, std::size_t temporal,
                                   const LstmWeights& w);

ad::Var fuse_concat(const ad::Var& x_emb, const ad::Var& e_emb);
ad::Var fuse_add(const ad::Var& x_emb, const ad::Var& e_emb, const ad::Var& w_st, const ad::Var& w_e, const ad::Var& b1);
ad::Var fuse_gating(const ad::Var& x_emb, const ad::Var& e_emb, const ad::Var& w_g, const ad::Var& b2,
                    bool outer_sigmoid = true);

}  // namespace ctxbench::model
