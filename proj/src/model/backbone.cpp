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

#include "ctxbench/model/backbone.hpp"

#include <stdexcept>
#include <string>

namespace ctxbench::model {

using ad::Broadcast;
using ad::Var;

GruWeights GruWeights::create(ParamStore& store, const std::string& prefix, std::size_t input_dim, std::size_t hidden) {
  GruWeights w;
  w.wx = store.weight(prefix + ".wx", input_dim, 3 * hidden);
  w.wh = store.weight(prefix + ".wh", hidden, 2 * hidden);
  w.whc = store.weight(prefix + ".whc", hidden, hidden);
  w.b = store.bias(prefix + ".b", 3 * hidden);
  return w;
}

namespace {

// Step given the propagated and projected input term AX Wx + b of all steps; `step` selects the rows.
Var step_projected(const Var& h, const Var& xproj, std::size_t step, const ad::Tensor& adj, const GruWeights& w,
                   GateTrace* trace) {
  const Var hz_r = ad::matmul(ad::propagate(adj, h), w.wh);
  const Var reset_h = ad::gru_reset_hidden(xproj, step, hz_r, h);
  const Var cand = ad::matmul(ad::propagate(adj, reset_h), w.whc);
  if (trace) {
    const std::size_t hd = w.hidden(), rows = h.shape()[0];
    const Var xs = ad::slice(xproj, 0, step * rows, (step + 1) * rows);
    trace->update = ad::sigmoid(ad::add(ad::slice(xs, 1, 0, hd), ad::slice(hz_r, 1, 0, hd))).value();
    trace->reset = ad::sigmoid(ad::add(ad::slice(xs, 1, hd, 2 * hd), ad::slice(hz_r, 1, hd, 2 * hd))).value();
  }
  return ad::gru_update(xproj, step, hz_r, cand, h);
}

Var project_input(const Var& x, const ad::Tensor& adj, const GruWeights& w, std::size_t group_rows) {
  return ad::add(ad::matmul(ad::propagate(adj, x, group_rows), w.wx), w.b, Broadcast::trailing);
}

}  // namespace

Var gconv_recurrent_step(const Var& hidden, const Var& input, const ad::Tensor& adj, const GruWeights& w,
                         GateTrace* trace) {
  if (hidden.shape().size() != 2 || hidden.shape()[1] != w.hidden() || input.shape().size() != 2 ||
      input.shape()[0] != hidden.shape()[0]) {
    throw ad::ShapeError("gconv_recurrent_step: hidden " + ad::to_string(hidden.shape()) + " and input " +
                         ad::to_string(input.shape()) + " do not fit hidden width " + std::to_string(w.hidden()));
  }
  return step_projected(hidden, project_input(input, adj, w, 0), 0, adj, w, trace);
}

Var gconv_recurrent_unroll(const Var& inputs, const ad::Tensor& adj, const GruWeights& w) {
  if (inputs.shape().size() != 3) throw ad::ShapeError("gconv_recurrent_unroll expects steps x rows x features");
  const std::size_t steps = inputs.shape()[0], rows = inputs.shape()[1], d = inputs.shape()[2];
  if (steps == 0) throw ad::ShapeError("gconv_recurrent_unroll: no steps");
  // The input term has no recurrence, so all steps share one propagation and one matmul.
  const Var xproj = project_input(ad::reshape(inputs, {steps * rows, d}), adj, w, rows);
  Var h = Var::constant(ad::Tensor({rows, w.hidden()}));
  for (std::size_t s = 0; s < steps; ++s) {
    h = step_projected(h, xproj, s, adj, w, nullptr);
  }
  return h;
}

BackboneParams BackboneParams::create(ParamStore& store, const WindowSpec& window, const BackboneConfig& config,
                                      std::size_t input_dim, std::size_t graphs) {
  if (graphs == 0) throw std::invalid_argument("backbone needs at least one graph");
  BackboneParams p;
  p.aggregation = config.aggregation;
  const std::size_t counts[3] = {window.closeness, window.daily, window.weekly};
  static const char* const kBranch[3] = {"closeness", "daily", "weekly"};
  std::size_t branches = 0;
  for (int br = 0; br < 3; ++br) {
    if (counts[br] == 0) continue;
    ++branches;
    std::vector<GruWeights> per_graph;
    for (std::size_t g = 0; g < graphs; ++g) {
      per_graph.push_back(GruWeights::create(store, std::string("backbone.") + kBranch[br] + ".g" + std::to_string(g),
                                             input_dim, config.hidden));
    }
    p.cells.push_back(std::move(per_graph));
    if (config.aggregation == GraphAggregation::weighted) {
      p.graph_weights.push_back(store.tensor(std::string("backbone.") + kBranch[br] + ".graph_weights",
                                             ad::Tensor({graphs}, 1.0 / static_cast<double>(graphs))));
    }
  }
  if (branches == 0) throw std::invalid_argument("backbone needs at least one window branch");
  p.w_out = store.weight("backbone.w_out", branches * config.hidden, config.embedding);
  p.b_out = store.bias("backbone.b_out", config.embedding);
  return p;
}

Var backbone_forward(const Var& inputs, std::span<const ad::Tensor* const> graphs, const BackboneParams& params,
                     const WindowSpec& window) {
  if (graphs.empty()) throw std::invalid_argument("backbone_forward: empty graph list");
  if (inputs.shape().size() != 3 || inputs.shape()[0] != window.steps()) {
    throw ad::ShapeError("backbone_forward: expected " + std::to_string(window.steps()) + " x rows x features, got " +
                         ad::to_string(inputs.shape()));
  }
  const std::size_t counts[3] = {window.closeness, window.daily, window.weekly};
  std::vector<Var> branch_out;
  std::size_t offset = 0, branch = 0;
  for (std::size_t count : counts) {
    if (count == 0) continue;
    const auto& cells = params.cells.at(branch);
    if (cells.size() != graphs.size()) throw std::invalid_argument("backbone_forward: graph count differs from parameters");
    const Var slice = ad::slice(inputs, 0, offset, offset + count);
    Var agg;
    for (std::size_t g = 0; g < graphs.size(); ++g) {
      Var h = gconv_recurrent_unroll(slice, *graphs[g], cells[g]);
      if (params.aggregation == GraphAggregation::weighted) {
        h = ad::hadamard(h, ad::reshape(ad::slice(params.graph_weights[branch], 0, g, g + 1), {}), Broadcast::trailing);
      }
      agg = g == 0 ? h : ad::add(agg, h);
    }
    if (params.aggregation == GraphAggregation::mean && graphs.size() > 1) {
      agg = ad::scale(agg, 1.0 / static_cast<double>(graphs.size()));
    }
    branch_out.push_back(agg);
    offset += count;
    ++branch;
  }
  const Var joined = branch_out.size() == 1 ? branch_out[0] : ad::concat(branch_out, 1);
  return ad::add(ad::matmul(joined, params.w_out), params.b_out, Broadcast::trailing);
}

OutputHead OutputHead::create(ParamStore& store, std::size_t input_dim) {
  return {store.weight("head.w", input_dim, 1), store.bias("head.b", 1)};
}

Var OutputHead::operator()(const Var& fused) const {
  return ad::add(ad::matmul(fused, w), b, Broadcast::trailing);
}

}  // namespace ctxbench::model
