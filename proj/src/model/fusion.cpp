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

#include "ctxbench/model/fusion.hpp"

#include <algorithm>

#include <charconv>

namespace ctxbench::model {

using ad::Broadcast;
using ad::Var;

namespace {

constexpr std::array<std::size_t, 4> kDefaultFamilyDims{8, 1, 8, 8};

std::string_view representation_name(Representation r) {
  switch (r) {
    case Representation::raw: return "Raw";
    case Representation::embed: return "Emb";
    case Representation::multi_embed: return "MultiEmb";
    case Representation::lstm: return "LSTM";
  }
  return "?";
}

std::string_view fusion_name(FusionOp f) {
  switch (f) {
    case FusionOp::concat: return "Concat";
    case FusionOp::add: return "Add";
    case FusionOp::gating: return "Gating";
  }
  return "?";
}

std::size_t parse_width(std::string_view tok, std::string_view full) {
  std::size_t v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || v == 0) {
    throw UnknownTechnique("invalid width '" + std::string(tok) + "' in technique '" + std::string(full) + "'");
  }
  return v;
}

Var as_rows(const Var& stack) {
  const auto& s = stack.shape();
  return ad::reshape(stack, {s[0] * s[1], s[2]});
}

void require_stack(const Var& v, const char* what) {
  if (v.shape().size() != 3) throw ad::ShapeError(std::string(what) + ": expected steps x rows x features, got " +
                                                   ad::to_string(v.shape()));
}

}  // namespace

const std::vector<std::string>& technique_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out{"EarlyConcat", "EarlyAdd"};
    for (auto r : {Representation::raw, Representation::embed, Representation::multi_embed, Representation::lstm})
      for (auto f : {FusionOp::concat, FusionOp::add, FusionOp::gating})
        out.push_back(std::string(representation_name(r)) + "-" + std::string(fusion_name(f)));
    return out;
  }();
  return names;
}

FusionSpec FusionSpec::parse(std::string_view full) {
  const std::size_t at = full.find('@');
  const std::string_view base = full.substr(0, at);
  FusionSpec spec;
  if (base == "NoContext") {
    spec.stage = Stage::none;
  } else if (base == "EarlyConcat") {
    spec.stage = Stage::early_concat;
  } else if (base == "EarlyAdd") {
    spec.stage = Stage::early_add;
  } else {
    bool found = false;
    for (auto r : {Representation::raw, Representation::embed, Representation::multi_embed, Representation::lstm})
      for (auto f : {FusionOp::concat, FusionOp::add, FusionOp::gating})
        if (base == std::string(representation_name(r)) + "-" + std::string(fusion_name(f))) {
          spec.stage = Stage::late;
          spec.representation = r;
          spec.fusion = f;
          found = true;
        }
    if (!found) throw UnknownTechnique("unknown technique '" + std::string(full) + "'");
  }
  if (at == std::string_view::npos) return spec;

  const std::string_view suffix = full.substr(at + 1);
  if (spec.stage != Stage::late || spec.representation == Representation::raw) {
    throw UnknownTechnique("technique '" + std::string(base) + "' takes no width suffix");
  }
  if (spec.representation == Representation::multi_embed) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      const std::size_t dash = i < 3 ? suffix.find('-', pos) : suffix.size();
      if (dash == std::string_view::npos) throw UnknownTechnique("expected four widths in '" + std::string(full) + "'");
      spec.family_dims[i] = parse_width(suffix.substr(pos, dash - pos), full);
      pos = dash + 1;
    }
  } else if (spec.representation == Representation::embed) {
    spec.embed_dim = parse_width(suffix, full);
  } else {
    spec.lstm_hidden = parse_width(suffix, full);
  }
  return spec;
}

std::string FusionSpec::name() const {
  switch (stage) {
    case Stage::none: return "NoContext";
    case Stage::early_concat: return "EarlyConcat";
    case Stage::early_add: return "EarlyAdd";
    case Stage::late: break;
  }
  return std::string(representation_name(representation)) + "-" + std::string(fusion_name(fusion));
}

std::string FusionSpec::label() const {
  std::string out = name();
  if (stage != Stage::late) return out;
  if (representation == Representation::embed && embed_dim != 16) out += "@" + std::to_string(embed_dim);
  if (representation == Representation::lstm && lstm_hidden != 16) out += "@" + std::to_string(lstm_hidden);
  if (representation == Representation::multi_embed && family_dims != kDefaultFamilyDims) {
    out += "@";
    for (std::size_t i = 0; i < 4; ++i) out += (i ? "-" : "") + std::to_string(family_dims[i]);
  }
  return out;
}

Var early_concat(const Var& context, const Var& flow) {
  require_stack(context, "early_concat");
  require_stack(flow, "early_concat");
  if (context.shape()[2] == 0) return flow;
  const std::vector<Var> parts{flow, context};
  return ad::concat(parts, 2);
}

Var early_add(const Var& context, const Var& flow, const Var& w_e, const Var& w_st, const Var& b_e) {
  require_stack(context, "early_add");
  require_stack(flow, "early_add");
  const std::size_t p = flow.shape()[0], rows = flow.shape()[1], d2 = w_st.shape().at(1);
  if (context.shape()[0] != p || context.shape()[1] != rows) {
    throw ad::ShapeError("early_add: context " + ad::to_string(context.shape()) + " vs flow " + ad::to_string(flow.shape()));
  }
  Var out = ad::matmul(as_rows(flow), w_st);
  if (context.shape()[2] > 0) out = ad::add(out, ad::matmul(as_rows(context), w_e));
  return ad::reshape(ad::add(out, b_e, Broadcast::trailing), {p, rows, d2});
}

Var repr_raw(const Var& window) {
  require_stack(window, "repr_raw");
  const std::size_t p = window.shape()[0];
  if (p == 0) throw ad::ShapeError("repr_raw: empty window");
  return ad::reshape(ad::slice(window, 0, p - 1, p), {window.shape()[1], window.shape()[2]});
}

Var repr_embed(const Var& last, const Var& w, const Var& b) {
  return ad::relu(ad::add(ad::matmul(last, w), b, Broadcast::trailing));
}

Var repr_multi_embed(const Var& last, const std::vector<FamilyEmbedding>& families) {
  std::vector<Var> parts;
  for (const auto& f : families) {
    if (f.end > last.shape().at(1) || f.begin >= f.end) {
      throw ad::ShapeError("repr_multi_embed: family columns [" + std::to_string(f.begin) + "," + std::to_string(f.end) +
                           ") do not fit context " + ad::to_string(last.shape()));
    }
    parts.push_back(repr_embed(ad::slice(last, 1, f.begin, f.end), f.w, f.b));
  }
  if (parts.empty()) return Var::constant(ad::Tensor({last.shape().at(0), 0}));
  return parts.size() == 1 ? parts[0] : ad::concat(parts, 1);
}

LstmWeights LstmWeights::create(ParamStore& store, const std::string& prefix, std::size_t input_dim, std::size_t hidden) {
  return {store.weight(prefix + ".wx", input_dim, 4 * hidden), store.weight(prefix + ".wh", hidden, 4 * hidden),
          store.bias(prefix + ".b", 4 * hidden)};
}

Var repr_lstm(const Var& window, const LstmWeights& w) {
  require_stack(window, "repr_lstm");
  if (window.shape()[0] == 0) throw ad::ShapeError("repr_lstm: empty window");
  return repr_lstm_projected(ad::add(ad::matmul(as_rows(window), w.wx), w.b, Broadcast::trailing), window.shape()[0], w);
}

Var repr_lstm_projected(const Var& xproj, std::size_t steps, const LstmWeights& w) {
  const std::size_t hd = w.hidden();
  if (steps == 0 || xproj.shape().size() != 2 || xproj.shape()[0] % steps != 0 || xproj.shape()[1] != 4 * hd) {
    throw ad::ShapeError("repr_lstm: projection " + ad::to_string(xproj.shape()) + " over " + std::to_string(steps) +
                         " steps, hidden " + std::to_string(hd));
  }
  const std::size_t rows = xproj.shape()[0] / steps;
  Var h = Var::constant(ad::Tensor({rows, hd}));
  Var c = h;
  for (std::size_t s = 0; s < steps; ++s) {
    const Var state = ad::lstm_step(xproj, s, ad::matmul(h, w.wh), c);
    h = ad::slice(state, 1, 0, hd);
    c = ad::slice(state, 1, hd, 2 * hd);
  }
  return h;
}

bool is_replicated(const ad::Tensor& window, std::size_t nodes, std::size_t temporal) {
  if (window.rank() != 3 || nodes == 0 || window.dim(1) % nodes != 0 || temporal > window.dim(2)) return false;
  const std::size_t p = window.dim(0), rows = window.dim(1), f = window.dim(2), b = rows / nodes;
  const double* v = window.data().data();
  auto at = [&](std::size_t step, std::size_t row) { return v + (step * rows + row) * f; };
  for (std::size_t s = 0; s < p; ++s)
    for (std::size_t i = 0; i < nodes; ++i)
      for (std::size_t k = 0; k < b; ++k) {
        const double* x = at(s, i * b + k);
        if (!std::equal(x, x + temporal, at(s, k))) return false;
        if (!std::equal(x + temporal, x + f, at(0, i * b + k) + temporal)) return false;
        // Spatial columns must also agree across the samples of one node.
        if (!std::equal(x + temporal, x + f, at(0, i * b) + temporal)) return false;
      }
  return true;
}

Var lstm_replicated_projection(const ad::Tensor& window, std::size_t nodes, std::size_t temporal, const LstmWeights& w) {
  if (!is_replicated(window, nodes, temporal)) {
    throw ad::ShapeError("lstm_replicated_projection: window " + ad::to_string(window.shape()) +
                         " is not replicated over " + std::to_string(nodes) + " nodes");
  }
  const std::size_t p = window.dim(0), rows = window.dim(1), f = window.dim(2), b = rows / nodes;
  ad::Tensor per_sample({p * b, temporal});
  ad::Tensor per_node({nodes, f - temporal});
  const double* v = window.data().data();
  for (std::size_t s = 0; s < p; ++s)
    for (std::size_t k = 0; k < b; ++k)
      std::copy_n(v + (s * rows + k) * f, temporal, per_sample.data().data() + (s * b + k) * temporal);
  for (std::size_t i = 0; i < nodes; ++i)
    std::copy_n(v + i * b * f + temporal, f - temporal, per_node.data().data() + i * (f - temporal));

  const Var t_proj = temporal > 0 ? ad::matmul(Var::constant(per_sample), ad::slice(w.wx, 0, 0, temporal))
                                  : Var::constant(ad::Tensor({p * b, w.wx.shape()[1]}));
  const Var n_proj = temporal < f ? ad::matmul(Var::constant(per_node), ad::slice(w.wx, 0, temporal, f))
                                  : Var::constant(ad::Tensor({nodes, w.wx.shape()[1]}));
  return ad::add(ad::replicate_sum(t_proj, n_proj, p), w.b, Broadcast::trailing);
}

Var fuse_concat(const Var& x_emb, const Var& e_emb) {
  if (x_emb.shape().at(0) != e_emb.shape().at(0)) {
    throw ad::ShapeError("fuse_concat: row mismatch " + ad::to_string(x_emb.shape()) + " vs " + ad::to_string(e_emb.shape()));
  }
  if (e_emb.shape().at(1) == 0) return x_emb;
  const std::vector<Var> parts{x_emb, e_emb};
  return ad::concat(parts, 1);
}

Var fuse_add(const Var& x_emb, const Var& e_emb, const Var& w_st, const Var& w_e, const Var& b1) {
  Var out = ad::matmul(x_emb, w_st);
  if (e_emb.shape().at(1) > 0) out = ad::add(out, ad::matmul(e_emb, w_e));
  return ad::add(out, b1, Broadcast::trailing);
}

Var fuse_gating(const Var& x_emb, const Var& e_emb, const Var& w_g, const Var& b2, bool outer_sigmoid) {
  Var pre = ad::add(ad::matmul(e_emb, w_g), b2, Broadcast::trailing);
  const Var gate = ad::sigmoid(pre);
  const Var gated = ad::hadamard(gate, x_emb);
  return outer_sigmoid ? ad::sigmoid(gated) : gated;
}

}  // namespace ctxbench::model
