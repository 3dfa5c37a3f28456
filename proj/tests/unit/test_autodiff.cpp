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

#include <cmath>
#include <vector>

#include "ctxbench/autodiff/ops.hpp"
#include "ctxbench/autodiff/optim.hpp"
#include "ctxbench/core/random.hpp"

using namespace ctxbench;
using namespace ctxbench::ad;

namespace {

Tensor random_tensor(Rng& rng, Shape shape, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(-scale, scale);
  return t;
}

}  // namespace

TEST_CASE("matmul") {
  const Var id = Var::constant(Tensor::identity(2));
  const Var m = Var::constant(Tensor::matrix({{1, 2}, {3, 4}}));
  CHECK(matmul(id, m).value() == m.value());

  const Var col = Var::constant(Tensor::matrix({{0}, {1}}));
  CHECK(matmul(m, col).value() == Tensor::matrix({{2}, {4}}));

  const Var a = Var::constant(Tensor({2, 3}));
  const Var b = Var::constant(Tensor({4, 2}));
  CHECK_THROWS_AS(matmul(a, b), ShapeError);
  try {
    matmul(a, b);
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[2x3]") != std::string::npos);
    CHECK(msg.find("[4x2]") != std::string::npos);
  }
}

TEST_CASE("elementwise ops") {
  CHECK(sigmoid(Var::constant(Tensor::scalar(0.0))).value().item() == 0.5);
  for (double x : {40.0, 1e4, -800.0, -1e4}) {
    const double y = ad::sigmoid(x);
    CHECK(y > 0.0);
    CHECK(y < 1.0);
  }
  const Var h = hadamard(Var::constant(Tensor::vector({1, 2, 3})), Var::constant(Tensor::vector({2, 0, -1})));
  CHECK(h.value() == Tensor::vector({2, 0, -3}));
  CHECK_THROWS_AS(add(Var::constant(Tensor::vector({1, 2})), Var::constant(Tensor::vector({1, 2, 3}))), ShapeError);

  SUBCASE("declared broadcasts") {
    const Var m = Var::constant(Tensor::matrix({{1, 2, 3}, {4, 5, 6}}));
    const Var row = Var::constant(Tensor::vector({10, 20, 30}));
    CHECK(add(m, row, Broadcast::trailing).value() == Tensor::matrix({{11, 22, 33}, {14, 25, 36}}));
    const Var per_row = Var::constant(Tensor::vector({1, -1}));
    CHECK(hadamard(m, per_row, Broadcast::leading).value() == Tensor::matrix({{1, 2, 3}, {-4, -5, -6}}));
    CHECK_THROWS_AS(add(m, row), ShapeError);
    CHECK_THROWS_AS(add(m, per_row, Broadcast::trailing), ShapeError);
  }

  SUBCASE("relu and tanh") {
    const Var x = Var::constant(Tensor::vector({-1.0, 0.0, 2.0}));
    CHECK(relu(x).value() == Tensor::vector({0.0, 0.0, 2.0}));
    CHECK(tanh(x).value()[2] == doctest::Approx(std::tanh(2.0)));
  }

  SUBCASE("non-finite output is an error") {
    const Var big = Var::constant(Tensor::vector({1e308}));
    CHECK_THROWS_AS(scale(big, 10.0), NumericError);
  }
}

TEST_CASE("concat and slice") {
  const Var a = Var::constant(Tensor({4, 3}, 1.0));
  const Var b = Var::constant(Tensor({4, 5}, 2.0));
  const std::vector<Var> parts{a, b};
  const Var c = concat(parts, 1);
  CHECK(c.shape() == Shape{4, 8});

  const std::vector<Var> single{a};
  CHECK(concat(single, 1).value() == a.value());

  const std::vector<Var> bad{Var::constant(Tensor({2, 3})), Var::constant(Tensor({3, 3}))};
  CHECK_THROWS_AS(concat(bad, 1), ShapeError);

  SUBCASE("slice inverts concat bit-exactly on every axis") {
    Rng rng(7);
    for (std::size_t axis = 0; axis < 3; ++axis) {
      Shape sa{2, 3, 4}, sb{2, 3, 4};
      sb[axis] = 5;
      const Var x = Var::constant(random_tensor(rng, sa));
      const Var y = Var::constant(random_tensor(rng, sb));
      const std::vector<Var> xy{x, y};
      const Var joined = concat(xy, axis);
      CHECK(slice(joined, axis, 0, sa[axis]).value() == x.value());
      CHECK(slice(joined, axis, sa[axis], sa[axis] + sb[axis]).value() == y.value());
    }
  }
}

TEST_CASE("reductions") {
  CHECK(mean(Var::constant(Tensor::vector({1, 2, 3}))).value().item() == 2.0);
  CHECK(sum(Var::constant(Tensor({5}))).value().item() == 0.0);
  CHECK(sum(Var::constant(Tensor::matrix({{1, 2}, {3, 4}})), 0).value() == Tensor::vector({4, 6}));
  CHECK(sum(Var::constant(Tensor::matrix({{1, 2}, {3, 4}})), 1).value() == Tensor::vector({3, 7}));
  CHECK_THROWS_AS(sum(Var::constant(Tensor::matrix({{1, 2}})), 2), ShapeError);
}

TEST_CASE("backward") {
  SUBCASE("sigmoid derivative at zero") {
    Var x = Var::parameter(Tensor::scalar(0.0));
    backward(sigmoid(x));
    CHECK(x.grad().item() == doctest::Approx(0.25));
  }
  SUBCASE("product rule") {
    Var x = Var::parameter(Tensor::scalar(2.0));
    Var y = Var::parameter(Tensor::scalar(3.0));
    backward(hadamard(x, y));
    CHECK(x.grad().item() == 3.0);
    CHECK(y.grad().item() == 2.0);
  }
  SUBCASE("non-scalar loss is rejected") {
    Var x = Var::parameter(Tensor::vector({1, 2}));
    CHECK_THROWS_AS(backward(x), ShapeError);
  }
  SUBCASE("leaf ignored by the loss gets exactly zero gradient") {
    Var used = Var::parameter(Tensor::vector({1, 2}));
    Var unused = Var::parameter(Tensor::vector({3, 4}));
    backward(sum(hadamard(used, used)));
    CHECK(unused.grad() == Tensor::vector({0, 0}));
    CHECK(used.grad() == Tensor::vector({2, 4}));
  }
  SUBCASE("shared subexpression is visited once") {
    Var x = Var::parameter(Tensor::scalar(1.5));
    const Var s = sigmoid(x);
    const Var loss = add(s, s);
    backward(loss);
    const double sv = ad::sigmoid(1.5);
    CHECK(x.grad().item() == doctest::Approx(2.0 * sv * (1.0 - sv)));
    CHECK(graph_size(loss) == 3);
  }
}

TEST_CASE("grad_check") {
  Rng rng(11);
  SUBCASE("linear function") {
    Var w = Var::parameter(random_tensor(rng, {3, 2}));
    const Var x = Var::constant(random_tensor(rng, {4, 3}));
    std::vector<Var> params{w};
    CHECK(grad_check([&] { return sum(matmul(x, w)); }, params) < 1e-8);
  }
  SUBCASE("sigmoid chain at a random point") {
    Var w = Var::parameter(random_tensor(rng, {3, 3}));
    Var b = Var::parameter(random_tensor(rng, {3}));
    const Var x = Var::constant(random_tensor(rng, {2, 3}));
    std::vector<Var> params{w, b};
    auto f = [&] { return mean(sigmoid(add(matmul(sigmoid(matmul(x, w)), w), b, Broadcast::trailing))); };
    CHECK(grad_check(f, params) < 1e-4);
  }
  SUBCASE("constant function") {
    Var w = Var::parameter(random_tensor(rng, {2}));
    std::vector<Var> params{w};
    auto f = [&] { return add(sum(scale(w, 0.0)), Var::constant(Tensor::scalar(3.0))); };
    CHECK(grad_check(f, params) == 0.0);
    CHECK(w.grad() == Tensor::vector({0, 0}));
  }
  SUBCASE("every op composite matches finite differences") {
    Var a = Var::parameter(random_tensor(rng, {2, 3, 4}));
    Var b = Var::parameter(random_tensor(rng, {2, 3, 2}));
    Var row = Var::parameter(random_tensor(rng, {6}));
    Var lead = Var::parameter(random_tensor(rng, {2, 3}));
    std::vector<Var> params{a, b, row, lead};
    const Tensor adj = Tensor::matrix({{0.5, 0.5, 0.0}, {0.5, 0.25, 0.25}, {0.0, 0.25, 0.75}});
    auto f = [&] {
      const std::vector<Var> parts{tanh(a), relu(add_scalar(b, 0.3))};
      Var c = concat(parts, 2);                       // 2x3x6
      c = add(c, row, Broadcast::trailing);
      c = hadamard(c, lead, Broadcast::leading);
      Var m = reshape(slice(c, 2, 1, 5), {6, 4});     // 6x4
      m = propagate(adj, m, 3);                       // two 3-node groups
      Var s = sub(one_minus(sigmoid(m)), hadamard(m, mean(m, 1), Broadcast::leading));
      return add(mean(hadamard(s, s)), mean(sum(m, 0)));
    };
    CHECK(grad_check(f, params) < 1e-6);
  }
}

TEST_CASE("propagate") {
  Rng rng(5);
  const Tensor adj = random_tensor(rng, {3, 3});
  const Tensor x = random_tensor(rng, {12, 2});  // 2 groups, 3 nodes x 2 samples each
  const Tensor out = propagate(adj, Var::constant(x), 6).value();
  // Brute force: row i * k + s of a group mixes rows j * k + s of the same group.
  for (std::size_t g = 0; g < 2; ++g)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t smp = 0; smp < 2; ++smp)
        for (std::size_t c = 0; c < 2; ++c) {
          double want = 0.0;
          for (std::size_t j = 0; j < 3; ++j) want += adj.at(i, j) * x.at(g * 6 + j * 2 + smp, c);
          CHECK(out.at(g * 6 + i * 2 + smp, c) == doctest::Approx(want).epsilon(1e-12));
        }
  CHECK_THROWS_AS(propagate(adj, Var::constant(x), 4), ShapeError);
  CHECK_THROWS_AS(propagate(adj, Var::constant(Tensor({4, 2}))), ShapeError);

  Var p = Var::parameter(x);
  std::vector<Var> params{p};
  CHECK(grad_check([&] { return mean(tanh(propagate(adj, p, 6))); }, params) < 1e-6);
}

TEST_CASE("fused recurrent ops") {
  Rng rng(17);
  const std::size_t rows = 4, hd = 3, steps = 2;
  Var gates = Var::parameter(random_tensor(rng, {steps * rows, 3 * hd}));
  Var hp = Var::parameter(random_tensor(rng, {rows, 2 * hd}));
  Var cp = Var::parameter(random_tensor(rng, {rows, hd}));
  Var h = Var::parameter(random_tensor(rng, {rows, hd}));

  SUBCASE("forward matches the composed elementwise ops") {
    const Var xs = slice(gates, 0, rows, 2 * rows);
    const Var z = sigmoid(add(slice(xs, 1, 0, hd), slice(hp, 1, 0, hd)));
    const Var r = sigmoid(add(slice(xs, 1, hd, 2 * hd), slice(hp, 1, hd, 2 * hd)));
    const Var c = tanh(add(slice(xs, 1, 2 * hd, 3 * hd), cp));
    const Tensor want_rh = hadamard(r, h).value();
    const Tensor want_h = add(hadamard(z, h), hadamard(one_minus(z), c)).value();
    const Tensor got_rh = gru_reset_hidden(gates, 1, hp, h).value();
    const Tensor got_h = gru_update(gates, 1, hp, cp, h).value();
    for (std::size_t i = 0; i < want_h.size(); ++i) {
      CHECK(got_rh[i] == doctest::Approx(want_rh[i]).epsilon(1e-14));
      CHECK(got_h[i] == doctest::Approx(want_h[i]).epsilon(1e-14));
    }
  }
  SUBCASE("gradients match finite differences") {
    std::vector<Var> params{gates, hp, cp, h};
    auto f = [&] {
      const Var a = gru_reset_hidden(gates, 0, hp, h);
      const Var b = gru_update(gates, 1, hp, add(cp, a), h);
      return mean(hadamard(b, b));
    };
    CHECK(grad_check(f, params) < 1e-6);
  }
  SUBCASE("step out of range") {
    CHECK_THROWS_AS(gru_update(gates, 2, hp, cp, h), ShapeError);
    CHECK_THROWS_AS(gru_reset_hidden(gates, 0, cp, h), ShapeError);
  }
}

TEST_CASE("fused lstm step") {
  Rng rng(23);
  const std::size_t rows = 3, hd = 2, steps = 3;
  Var gates = Var::parameter(random_tensor(rng, {steps * rows, 4 * hd}));
  Var hp = Var::parameter(random_tensor(rng, {rows, 4 * hd}));
  Var c = Var::parameter(random_tensor(rng, {rows, hd}));

  SUBCASE("forward matches the textbook cell") {
    const Tensor out = lstm_step(gates, 2, hp, c).value();
    REQUIRE(out.shape() == Shape{rows, 2 * hd});
    auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < hd; ++j) {
        auto pre = [&](std::size_t k) { return gates.value().at(2 * rows + r, k * hd + j) + hp.value().at(r, k * hd + j); };
        const double cn = sig(pre(1)) * c.value().at(r, j) + sig(pre(0)) * std::tanh(pre(2));
        CHECK(out.at(r, hd + j) == doctest::Approx(cn).epsilon(1e-14));
        CHECK(out.at(r, j) == doctest::Approx(sig(pre(3)) * std::tanh(cn)).epsilon(1e-14));
      }
  }
  SUBCASE("gradients match finite differences") {
    std::vector<Var> params{gates, hp, c};
    auto f = [&] {
      const Var first = lstm_step(gates, 0, hp, c);
      const Var cell = slice(first, 1, hd, 2 * hd);
      const Var second = lstm_step(gates, 1, hp, hadamard(cell, cell));
      return mean(hadamard(second, second));
    };
    CHECK(grad_check(f, params) < 1e-6);
  }
  SUBCASE("shape errors") {
    CHECK_THROWS_AS(lstm_step(gates, 3, hp, c), ShapeError);
    CHECK_THROWS_AS(lstm_step(gates, 0, c, c), ShapeError);
  }
}

TEST_CASE("replicate_sum") {
  Rng rng(29);
  const std::size_t steps = 2, nodes = 3, b = 2, k = 4;
  Var per_sample = Var::parameter(random_tensor(rng, {steps * b, k}));
  Var per_node = Var::parameter(random_tensor(rng, {nodes, k}));
  const Tensor out = replicate_sum(per_sample, per_node, steps).value();
  REQUIRE(out.shape() == Shape{steps * nodes * b, k});
  for (std::size_t p = 0; p < steps; ++p)
    for (std::size_t i = 0; i < nodes; ++i)
      for (std::size_t s = 0; s < b; ++s)
        for (std::size_t j = 0; j < k; ++j)
          CHECK(out.at((p * nodes + i) * b + s, j) == per_sample.value().at(p * b + s, j) + per_node.value().at(i, j));
  std::vector<Var> params{per_sample, per_node};
  CHECK(grad_check([&] { const Var y = replicate_sum(per_sample, per_node, steps); return mean(hadamard(y, y)); }, params) <
        1e-6);
  CHECK_THROWS_AS(replicate_sum(per_sample, per_node, 3), ShapeError);
  CHECK_THROWS_AS(replicate_sum(per_sample, Var::constant(Tensor({nodes, k + 1})), steps), ShapeError);
}

TEST_CASE("adam_step") {
  SUBCASE("zero gradient leaves parameters unchanged") {
    std::vector<Tensor> params{Tensor::vector({1.0, -2.0})};
    std::vector<Tensor> grads{Tensor::vector({0.0, 0.0})};
    AdamState state = make_adam_state(params);
    adam_step(state, params, grads);
    CHECK(params[0] == Tensor::vector({1.0, -2.0}));
  }
  SUBCASE("first step moves each coordinate by about the learning rate") {
    // m_hat = g and v_hat = g^2 after bias correction, so |update| = lr * |g| / (|g| + eps).
    std::vector<Tensor> params{Tensor::vector({1.0, -2.0, 0.5})};
    std::vector<Tensor> grads{Tensor::vector({3.0, -0.01, 1e-3})};
    AdamState state = make_adam_state(params, {.learning_rate = 0.1});
    adam_step(state, params, grads);
    const double gs[3] = {3.0, -0.01, 1e-3};
    const double start[3] = {1.0, -2.0, 0.5};
    for (int i = 0; i < 3; ++i) {
      const double expected = 0.1 * std::abs(gs[i]) / (std::abs(gs[i]) + 1e-8);
      CHECK(std::abs(params[0][i] - start[i]) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(state.step == 1);
  }
  SUBCASE("two steps reduce a convex quadratic") {
    Var x = Var::parameter(Tensor::scalar(3.0));
    Adam opt({x}, {.learning_rate = 0.1});
    auto loss = [&] { return hadamard(add_scalar(x, -1.0), add_scalar(x, -1.0)); };
    const double initial = loss().value().item();
    for (int i = 0; i < 2; ++i) {
      opt.zero_grad();
      backward(loss());
      opt.step();
    }
    CHECK(loss().value().item() < initial);
    CHECK(opt.state().step == 2);
  }
  SUBCASE("shape mismatch") {
    std::vector<Tensor> params{Tensor::vector({1.0, 2.0})};
    std::vector<Tensor> grads{Tensor::vector({1.0})};
    AdamState state = make_adam_state(params);
    CHECK_THROWS_AS(adam_step(state, params, grads), ShapeError);
  }
}

TEST_CASE("grad_check relative floor") {
  // d/dw of 1e-9 * w^2 + w at w = 1: the small term is still resolved exactly,
  // and the floor only matters for coordinates far below the largest gradient.
  Var w = Var::parameter(Tensor::vector({1.0, 2.0}));
  std::vector<Var> params{w};
  auto f = [&] { return sum(hadamard(w, add_scalar(scale(w, 1e-9), 1.0))); };
  CHECK(grad_check(f, params, 1e-6, 1e-3) < 1e-6);
  CHECK(grad_check(f, params) < 1e-6);
}
