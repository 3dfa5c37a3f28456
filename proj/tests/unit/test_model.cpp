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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctxbench/autodiff/optim.hpp"
#include "ctxbench/graph/graphs.hpp"
#include "ctxbench/model/backbone.hpp"
#include "ctxbench/model/fusion.hpp"
#include "ctxbench/model/window.hpp"
#include "support/toy.hpp"

using namespace ctxbench;
using namespace ctxbench::model;
using ad::Tensor;
using ad::Var;
using testing::random_tensor;

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// 4-cycle: every node has the same degree, so the propagation matrix has unit row sums.
Tensor ring4() {
  Tensor a({4, 4});
  for (std::size_t i = 0; i < 4; ++i) {
    a.at(i, (i + 1) % 4) = 1.0;
    a.at((i + 1) % 4, i) = 1.0;
  }
  return graph::normalize_adjacency(a);
}

}  // namespace

TEST_CASE("window lags") {
  WindowSpec w;
  CHECK(w.steps() == 17);
  const auto lags = w.lags();
  // Brute force: closeness 6..1, then d days back, then w weeks back.
  std::vector<std::size_t> want;
  for (std::size_t k = 6; k >= 1; --k) want.push_back(k);
  for (std::size_t d = 7; d >= 1; --d) want.push_back(d * 24);
  for (std::size_t k = 4; k >= 1; --k) want.push_back(k * 7 * 24);
  CHECK(lags == want);
  CHECK(w.first_valid_index() == 672);
  w.interval_minutes = 30;
  CHECK(w.first_valid_index() == 1344);
  w.interval_minutes = 120;
  CHECK(w.first_valid_index() == 336);

  SUBCASE("time order runs oldest to newest") {
    const auto order = w.time_order();
    const auto l = w.lags();
    REQUIRE(order.size() == 17);
    for (std::size_t k = 1; k < order.size(); ++k) CHECK(l[order[k - 1]] >= l[order[k]]);
    CHECK(l[order.back()] == 1);
  }
  SUBCASE("switched off branches") {
    WindowSpec c{.closeness = 3, .daily = 0, .weekly = 0, .interval_minutes = 60};
    CHECK(c.lags() == std::vector<std::size_t>{3, 2, 1});
    CHECK(c.first_valid_index() == 3);
  }
}

TEST_CASE("window samples") {
  const WindowSpec w;
  const auto s = window_samples(800, w, {600, 700});
  CHECK(s.targets.front() == 672);
  CHECK(s.targets.size() == 28);
  CHECK(s.skipped == 72);
  CHECK_THROWS(window_samples(800, w, {0, 600}));
  CHECK_THROWS(window_samples(800, w, {700, 900}));
}

TEST_CASE("make_batch") {
  const auto toy = testing::make_toy(3, 60, "Holi-TP-POIs");
  const Batch b = toy.batch(4);
  const auto& flow = toy.prepared->normalized_flow();
  const auto& targets = toy.prepared->train_targets();
  const auto lags = toy.prepared->window().lags();
  const std::size_t n = 3, et = toy.context->temporal_width(), es = toy.context->spatial_width();
  CHECK(b.flow.shape() == ad::Shape{17, 12, 1});
  CHECK(b.context.shape() == ad::Shape{17, 12, et + es});
  CHECK(b.target.shape() == ad::Shape{12, 1});
  for (std::size_t s = 0; s < 4; ++s) {
    const std::size_t t = targets[s];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t row = i * 4 + s;
      CHECK(b.target.at(row, 0) == flow.at(t, i));
      for (std::size_t k = 0; k < 17; ++k) {
        CHECK(b.flow.at(k, row, 0) == flow.at(t - lags[k], i));
      }
    }
    // Context of one sample equals the replicate-and-merge of its window.
    Tensor window({17, et});
    for (std::size_t k = 0; k < 17; ++k)
      for (std::size_t c = 0; c < et; ++c) window.at(k, c) = toy.context->temporal.values.at(t - lags[k], c);
    const Tensor merged = enc::replicate_and_merge(window, toy.context->spatial.values);
    for (std::size_t k = 0; k < 17; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < et + es; ++c) CHECK(b.context.at(k, i * 4 + s, c) == merged.at(k, i, c));
  }
  const Batch plain = toy.batch(4, false);
  CHECK(plain.context.dim(2) == 0);
}

TEST_CASE("gconv_recurrent_step") {
  Rng rng(21);
  ParamStore store(4);
  const std::size_t n = 3, d = 2, hd = 4;
  GruWeights w = GruWeights::create(store, "cell", d, hd);
  w.b.mutable_value() = random_tensor(rng, {3 * hd}, 0.5);

  SUBCASE("identity propagation reduces to a plain GRU") {
    const Tensor x = random_tensor(rng, {n, d});
    const Tensor h = random_tensor(rng, {n, hd});
    GateTrace trace;
    const Tensor out = gconv_recurrent_step(Var::constant(h), Var::constant(x), Tensor::identity(n), w, &trace).value();
    const Tensor& wx = w.wx.value();
    const Tensor& wh = w.wh.value();
    const Tensor& whc = w.whc.value();
    const Tensor& b = w.b.value();
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> z(hd), r(hd);
      for (std::size_t j = 0; j < hd; ++j) {
        double pz = b[j], pr = b[hd + j];
        for (std::size_t k = 0; k < d; ++k) {
          pz += x.at(i, k) * wx.at(k, j);
          pr += x.at(i, k) * wx.at(k, hd + j);
        }
        for (std::size_t k = 0; k < hd; ++k) {
          pz += h.at(i, k) * wh.at(k, j);
          pr += h.at(i, k) * wh.at(k, hd + j);
        }
        z[j] = sig(pz);
        r[j] = sig(pr);
      }
      for (std::size_t j = 0; j < hd; ++j) {
        double pc = b[2 * hd + j];
        for (std::size_t k = 0; k < d; ++k) pc += x.at(i, k) * wx.at(k, 2 * hd + j);
        for (std::size_t k = 0; k < hd; ++k) pc += r[k] * h.at(i, k) * whc.at(k, j);
        const double want = z[j] * h.at(i, j) + (1.0 - z[j]) * std::tanh(pc);
        CHECK(out.at(i, j) == doctest::Approx(want).epsilon(1e-12));
        CHECK(trace.update.at(i, j) == doctest::Approx(z[j]).epsilon(1e-12));
        CHECK(trace.reset.at(i, j) == doctest::Approx(r[j]).epsilon(1e-12));
      }
    }
  }
  SUBCASE("zero weights give half-open gates") {
    for (Var* v : {&w.wx, &w.wh, &w.whc, &w.b}) v->mutable_value().fill(0.0);
    const Tensor h = random_tensor(rng, {n, hd});
    GateTrace trace;
    const Tensor out =
        gconv_recurrent_step(Var::constant(h), Var::constant(random_tensor(rng, {n, d})), Tensor::identity(n), w, &trace)
            .value();
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(trace.update[i] == 0.5);
      CHECK(trace.reset[i] == 0.5);
      CHECK(out[i] == doctest::Approx(0.5 * h[i]));
    }
  }
  SUBCASE("unroll equals repeated steps") {
    const Tensor adj = graph::normalize_adjacency(Tensor::matrix({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}));
    const Var inputs = Var::constant(random_tensor(rng, {3, 2 * n, d}));  // 3 steps, 2 samples
    Var h = Var::constant(Tensor({2 * n, hd}));
    for (std::size_t s = 0; s < 3; ++s) {
      h = gconv_recurrent_step(h, ad::reshape(ad::slice(inputs, 0, s, s + 1), {2 * n, d}), adj, w);
    }
    const Tensor unrolled = gconv_recurrent_unroll(inputs, adj, w).value();
    for (std::size_t i = 0; i < unrolled.size(); ++i) CHECK(unrolled[i] == doctest::Approx(h.value()[i]).epsilon(1e-13));
  }
  SUBCASE("gradients on 3 nodes over 2 steps") {
    const Tensor adj = graph::normalize_adjacency(Tensor::matrix({{0, 1, 1}, {1, 0, 0}, {1, 0, 0}}));
    const Var inputs = Var::constant(random_tensor(rng, {2, n, d}));
    std::vector<Var> params{w.wx, w.wh, w.whc, w.b};
    auto f = [&] {
      const Var h = gconv_recurrent_unroll(inputs, adj, w);
      return ad::mean(ad::hadamard(h, h));
    };
    CHECK(ad::grad_check(f, params) < 1e-4);
  }
}

TEST_CASE("backbone_forward") {
  Rng rng(8);
  ParamStore store(2);
  const WindowSpec window;
  const std::size_t b = 2, n = 4;
  BackboneConfig cfg{.hidden = 5, .embedding = 6};
  const BackboneParams params = BackboneParams::create(store, window, cfg, 1, 2);
  const Tensor g1 = ring4();
  const Tensor g2 = graph::normalize_adjacency(Tensor::matrix({{0, 1, 1, 0}, {1, 0, 0, 0}, {1, 0, 0, 1}, {0, 0, 1, 0}}));

  SUBCASE("shape") {
    const std::vector<const Tensor*> graphs{&g1, &g2};
    const Var out = backbone_forward(Var::constant(random_tensor(rng, {17, b * n, 1})), graphs, params, window);
    CHECK(out.shape() == ad::Shape{b * n, 6});
    CHECK_THROWS_AS(backbone_forward(Var::constant(Tensor({16, b * n, 1})), graphs, params, window), ad::ShapeError);
  }
  SUBCASE("location permutation equivariance") {
    const std::size_t perm[4] = {2, 0, 3, 1};
    const Tensor x = random_tensor(rng, {17, b * n, 1});
    Tensor xp(x.shape());
    Tensor g1p({n, n}), g2p({n, n});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        g1p.at(i, j) = g1.at(perm[i], perm[j]);
        g2p.at(i, j) = g2.at(perm[i], perm[j]);
      }
      for (std::size_t k = 0; k < 17; ++k)
        for (std::size_t s = 0; s < b; ++s) xp.at(k, i * b + s, 0) = x.at(k, perm[i] * b + s, 0);
    }
    const std::vector<const Tensor*> graphs{&g1, &g2};
    const std::vector<const Tensor*> graphs_p{&g1p, &g2p};
    const Tensor out = backbone_forward(Var::constant(x), graphs, params, window).value();
    const Tensor outp = backbone_forward(Var::constant(xp), graphs_p, params, window).value();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t s = 0; s < b; ++s)
        for (std::size_t c = 0; c < 6; ++c)
          CHECK(outp.at(i * b + s, c) == doctest::Approx(out.at(perm[i] * b + s, c)).epsilon(1e-12));
  }
  SUBCASE("zero inputs on a regular graph give identical rows") {
    const std::vector<const Tensor*> graphs{&g1};
    ParamStore one(5);
    BackboneParams p1 = BackboneParams::create(one, window, cfg, 1, 1);
    for (auto& cell : p1.cells) cell[0].b.mutable_value() = random_tensor(rng, {15});
    const Tensor out = backbone_forward(Var::constant(Tensor({17, b * n, 1})), graphs, p1, window).value();
    for (std::size_t r = 1; r < b * n; ++r)
      for (std::size_t c = 0; c < 6; ++c) CHECK(out.at(r, c) == doctest::Approx(out.at(0, c)).epsilon(1e-12));
  }
  SUBCASE("weighted aggregation starts at the mean") {
    ParamStore a(9), m(9);
    BackboneConfig wc = cfg;
    wc.aggregation = GraphAggregation::weighted;
    const BackboneParams pw = BackboneParams::create(a, window, wc, 1, 2);
    const BackboneParams pm = BackboneParams::create(m, window, cfg, 1, 2);
    const std::vector<const Tensor*> graphs{&g1, &g2};
    const Var x = Var::constant(random_tensor(rng, {17, b * n, 1}));
    const Tensor ow = backbone_forward(x, graphs, pw, window).value();
    const Tensor om = backbone_forward(x, graphs, pm, window).value();
    // Graph weights are drawn after the cells, so both stores yield identical cells.
    for (std::size_t i = 0; i < ow.size(); ++i) CHECK(ow[i] == doctest::Approx(om[i]).epsilon(1e-12));
  }
}

TEST_CASE("output head") {
  ParamStore store(1);
  OutputHead head = OutputHead::create(store, 3);
  head.w.mutable_value() = Tensor::matrix({{1}, {2}, {3}});
  head.b.mutable_value() = Tensor::vector({0.5});
  const Tensor out = head(Var::constant(Tensor::matrix({{1, 1, 1}, {0, 0, -1}}))).value();
  CHECK(out == Tensor::matrix({{6.5}, {-2.5}}));
}

TEST_CASE("technique names") {
  CHECK(technique_names().size() == 14);
  for (const auto& name : technique_names()) {
    const FusionSpec spec = FusionSpec::parse(name);
    CHECK(spec.name() == name);
    CHECK(spec.label() == name);
    CHECK(spec.uses_context());
  }
  CHECK_FALSE(FusionSpec::parse("NoContext").uses_context());
  CHECK_THROWS_AS(FusionSpec::parse("Raw-Attention"), UnknownTechnique);
  CHECK_THROWS_AS(FusionSpec::parse("raw-gating"), UnknownTechnique);
  CHECK_THROWS_AS(FusionSpec::parse("Raw-Gating@4"), UnknownTechnique);
  CHECK_THROWS_AS(FusionSpec::parse("MultiEmb-Add@4-1-4"), UnknownTechnique);
  CHECK_THROWS_AS(FusionSpec::parse("Emb-Add@0"), UnknownTechnique);

  const FusionSpec emb = FusionSpec::parse("Emb-Concat@32");
  CHECK(emb.embed_dim == 32);
  CHECK(emb.label() == "Emb-Concat@32");
  CHECK(FusionSpec::parse("Emb-Concat@16").label() == "Emb-Concat");
  const FusionSpec multi = FusionSpec::parse("MultiEmb-Gating@4-1-4-2");
  CHECK(multi.family_dims == std::array<std::size_t, 4>{4, 1, 4, 2});
  CHECK(multi.label() == "MultiEmb-Gating@4-1-4-2");
  CHECK(FusionSpec::parse("LSTM-Add@8").lstm_hidden == 8);
}

TEST_CASE("fusion operators") {
  Rng rng(13);
  const std::size_t rows = 5, d1 = 4, d4 = 3;
  const Tensor x = random_tensor(rng, {rows, d1}, 3.0);
  const Tensor e = random_tensor(rng, {rows, d4});

  SUBCASE("gating saturates to the outer sigmoid of X") {
    const Var wg = Var::constant(Tensor({d4, d1}));
    const Var b2 = Var::constant(Tensor({d1}, 20.0));
    const Tensor out = fuse_gating(Var::constant(x), Var::constant(e), wg, b2).value();
    const Tensor inner = fuse_gating(Var::constant(x), Var::constant(e), wg, b2, false).value();
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out[i] == doctest::Approx(sig(x[i])).epsilon(1e-8));
      CHECK(inner[i] == doctest::Approx(x[i]).epsilon(1e-8));
    }
  }
  SUBCASE("gating output stays inside (0, 1)") {
    for (int trial = 0; trial < 20; ++trial) {
      const Tensor out = fuse_gating(Var::constant(random_tensor(rng, {rows, d1}, 5.0)),
                                     Var::constant(random_tensor(rng, {rows, d4}, 5.0)),
                                     Var::constant(random_tensor(rng, {d4, d1}, 2.0)),
                                     Var::constant(random_tensor(rng, {d1}, 2.0)))
                             .value();
      for (double v : out.data()) CHECK((v > 0.0 && v < 1.0));
    }
  }
  SUBCASE("add matches its definition") {
    const Tensor wst = random_tensor(rng, {d1, 2}), we = random_tensor(rng, {d4, 2}), b1 = random_tensor(rng, {2});
    const Tensor out =
        fuse_add(Var::constant(x), Var::constant(e), Var::constant(wst), Var::constant(we), Var::constant(b1)).value();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < 2; ++c) {
        double want = b1[c];
        for (std::size_t k = 0; k < d1; ++k) want += x.at(r, k) * wst.at(k, c);
        for (std::size_t k = 0; k < d4; ++k) want += e.at(r, k) * we.at(k, c);
        CHECK(out.at(r, c) == doctest::Approx(want).epsilon(1e-12));
      }
  }
  SUBCASE("concat appends the context embedding") {
    const Tensor out = fuse_concat(Var::constant(x), Var::constant(e)).value();
    CHECK(out.shape() == ad::Shape{rows, d1 + d4});
    CHECK(out.at(2, d1 + 1) == e.at(2, 1));
    CHECK(fuse_concat(Var::constant(x), Var::constant(Tensor({rows, 0}))).value() == x);
  }
  SUBCASE("unit gradient checks") {
    Var xs = Var::parameter(x), es = Var::parameter(e);
    Var wg = Var::parameter(random_tensor(rng, {d4, d1})), b2 = Var::parameter(random_tensor(rng, {d1}));
    Var wst = Var::parameter(random_tensor(rng, {d1, 2})), we = Var::parameter(random_tensor(rng, {d4, 2}));
    Var b1 = Var::parameter(random_tensor(rng, {2}));
    std::vector<Var> gp{xs, es, wg, b2};
    CHECK(ad::grad_check([&] { return ad::mean(fuse_gating(xs, es, wg, b2)); }, gp) < 1e-4);
    std::vector<Var> ap{xs, es, wst, we, b1};
    CHECK(ad::grad_check([&] { return ad::mean(ad::tanh(fuse_add(xs, es, wst, we, b1))); }, ap) < 1e-4);
  }
}

TEST_CASE("early fusion operators") {
  Rng rng(3);
  const std::size_t p = 3, rows = 4, f = 2, d2 = 5;
  const Tensor flow = random_tensor(rng, {p, rows, 1});
  const Tensor ctx = random_tensor(rng, {p, rows, f});

  const Tensor cat = early_concat(Var::constant(ctx), Var::constant(flow)).value();
  CHECK(cat.shape() == ad::Shape{p, rows, 1 + f});
  CHECK(cat.at(1, 2, 0) == flow.at(1, 2, 0));
  CHECK(cat.at(1, 2, 2) == ctx.at(1, 2, 1));

  const Tensor we = random_tensor(rng, {f, d2}), wst = random_tensor(rng, {1, d2}), be = random_tensor(rng, {d2});
  const Tensor add = early_add(Var::constant(ctx), Var::constant(flow), Var::constant(we), Var::constant(wst),
                               Var::constant(be))
                         .value();
  CHECK(add.shape() == ad::Shape{p, rows, d2});
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < d2; ++c) {
        double want = be[c] + flow.at(k, r, 0) * wst.at(0, c);
        for (std::size_t j = 0; j < f; ++j) want += ctx.at(k, r, j) * we.at(j, c);
        CHECK(add.at(k, r, c) == doctest::Approx(want).epsilon(1e-12));
      }

  Var vwe = Var::parameter(we), vwst = Var::parameter(wst), vbe = Var::parameter(be);
  std::vector<Var> params{vwe, vwst, vbe};
  CHECK(ad::grad_check(
            [&] { return ad::mean(ad::sigmoid(early_add(Var::constant(ctx), Var::constant(flow), vwe, vwst, vbe))); },
            params) < 1e-4);
}

TEST_CASE("context representations") {
  Rng rng(19);
  const std::size_t p = 2, rows = 3, f = 2, hd = 2;
  const Tensor window = random_tensor(rng, {p, rows, f});

  CHECK(repr_raw(Var::constant(window)).value().at(2, 1) == window.at(1, 2, 1));

  SUBCASE("lstm matches a hand unroll") {
    ParamStore store(6);
    LstmWeights w = LstmWeights::create(store, "lstm", f, hd);
    w.b.mutable_value() = random_tensor(rng, {4 * hd}, 0.3);
    const Tensor out = repr_lstm(Var::constant(window), w).value();
    const Tensor& wx = w.wx.value();
    const Tensor& wh = w.wh.value();
    const Tensor& b = w.b.value();
    for (std::size_t r = 0; r < rows; ++r) {
      double h[hd] = {0, 0}, c[hd] = {0, 0};
      for (std::size_t s = 0; s < p; ++s) {
        double pre[4 * hd];
        for (std::size_t j = 0; j < 4 * hd; ++j) {
          pre[j] = b[j];
          for (std::size_t k = 0; k < f; ++k) pre[j] += window.at(s, r, k) * wx.at(k, j);
          for (std::size_t k = 0; k < hd; ++k) pre[j] += h[k] * wh.at(k, j);
        }
        for (std::size_t j = 0; j < hd; ++j) {
          c[j] = sig(pre[hd + j]) * c[j] + sig(pre[j]) * std::tanh(pre[2 * hd + j]);
          h[j] = sig(pre[3 * hd + j]) * std::tanh(c[j]);
        }
      }
      for (std::size_t j = 0; j < hd; ++j) CHECK(out.at(r, j) == doctest::Approx(h[j]).epsilon(1e-12));
    }
    std::vector<Var> params{w.wx, w.wh, w.b};
    CHECK(ad::grad_check([&] { return ad::mean(repr_lstm(Var::constant(window), w)); }, params) < 1e-4);
  }
  SUBCASE("replicated windows project from their distinct rows") {
    const std::size_t steps = 3, nodes = 4, b = 2, et = 3, es = 2, width = et + es;
    const Tensor temporal = random_tensor(rng, {steps, b, et});
    const Tensor spatial = random_tensor(rng, {nodes, es});
    Tensor merged({steps, nodes * b, width});
    for (std::size_t s = 0; s < steps; ++s)
      for (std::size_t i = 0; i < nodes; ++i)
        for (std::size_t k = 0; k < b; ++k) {
          for (std::size_t c = 0; c < et; ++c) merged.at(s, i * b + k, c) = temporal.at(s, k, c);
          for (std::size_t c = 0; c < es; ++c) merged.at(s, i * b + k, et + c) = spatial.at(i, c);
        }
    ParamStore store(8);
    LstmWeights w = LstmWeights::create(store, "lstm", width, hd);
    w.b.mutable_value() = random_tensor(rng, {4 * hd}, 0.3);

    for (std::size_t split : {std::size_t{0}, et, width}) {
      CAPTURE(split);
      // Any split is consistent for columns that are constant in both directions; here only et is.
      if (split != et) {
        CHECK_FALSE(is_replicated(merged, nodes, split));
        continue;
      }
      REQUIRE(is_replicated(merged, nodes, split));
      const Tensor dense =
          ad::add(ad::matmul(Var::constant(merged.reshaped({steps * nodes * b, width})), w.wx), w.b, ad::Broadcast::trailing)
              .value();
      const Tensor fact = lstm_replicated_projection(merged, nodes, split, w).value();
      REQUIRE(fact.shape() == dense.shape());
      for (std::size_t i = 0; i < dense.size(); ++i) CHECK(fact[i] == doctest::Approx(dense[i]).epsilon(1e-13));
      std::vector<Var> params{w.wx, w.wh, w.b};
      CHECK(ad::grad_check([&] {
              return ad::mean(repr_lstm_projected(lstm_replicated_projection(merged, nodes, split, w), steps, w));
            }, params) < 1e-4);
    }
    Tensor broken = merged;
    broken.at(2, 5, 0) += 1e-9;
    CHECK_FALSE(is_replicated(broken, nodes, et));
    CHECK_THROWS_AS(lstm_replicated_projection(broken, nodes, et, w), ad::ShapeError);
    CHECK_FALSE(is_replicated(merged, 3, et));
  }
  SUBCASE("embedding widths follow the families present") {
    const auto all = testing::make_toy(3, 60, "All");
    CHECK(Model(all.config("MultiEmb-Concat"), 1).context_embedding_width() == 25);
    CHECK(Model(all.config("Emb-Concat"), 1).context_embedding_width() == 16);
    CHECK(Model(all.config("LSTM-Concat"), 1).context_embedding_width() == 16);
    CHECK(Model(all.config("Raw-Concat"), 1).context_embedding_width() == all.context->width());
    const auto holi = testing::make_toy(3, 60, "Holi");
    CHECK(Model(holi.config("MultiEmb-Add"), 1).context_embedding_width() == 1);
  }
}
