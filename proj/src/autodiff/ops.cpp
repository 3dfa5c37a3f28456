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

#include "ctxbench/autodiff/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace ctxbench::ad {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMatrix>;
using ConstMatMap = Eigen::Map<const RowMatrix>;

ConstMatMap as_matrix(const Tensor& t, std::size_t rows, std::size_t cols) {
  return ConstMatMap(t.data().data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

MatMap as_matrix(Tensor& t, std::size_t rows, std::size_t cols) {
  return MatMap(t.data().data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

using BackwardFn = std::function<void(Node&)>;

Var make_result(Tensor value, const char* op, std::initializer_list<const Var*> inputs, BackwardFn fn) {
  if (!value.all_finite()) throw NumericError(std::string("non-finite output from ") + op);
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->op = op;
  node->is_leaf = false;
  for (const Var* in : inputs) node->requires_grad = node->requires_grad || in->requires_grad();
  if (node->requires_grad) {
    for (const Var* in : inputs) node->inputs.push_back(in->shared());
    node->backward_fn = std::move(fn);
  }
  return Var(std::move(node));
}

Var make_result(Tensor value, const char* op, std::span<const Var> inputs, BackwardFn fn) {
  if (!value.all_finite()) throw NumericError(std::string("non-finite output from ") + op);
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->op = op;
  node->is_leaf = false;
  for (const Var& in : inputs) node->requires_grad = node->requires_grad || in.requires_grad();
  if (node->requires_grad) {
    for (const Var& in : inputs) node->inputs.push_back(in.shared());
    node->backward_fn = std::move(fn);
  }
  return Var(std::move(node));
}

bool wants_grad(const Node& n) { return n.requires_grad; }

// Broadcast layout of b over a: a is viewed as [outer x b_size x inner] and b repeats over
// outer (trailing) or over inner (leading). Equal shapes are outer = inner = 1.
struct BroadcastPlan {
  std::size_t outer = 1;
  std::size_t b_size = 0;
  std::size_t inner = 1;

  // Calls fn(a_index, b_index) for every element of a.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    std::size_t i = 0;
    if (inner == 1) {
      for (std::size_t o = 0; o < outer; ++o, i += b_size)
        for (std::size_t j = 0; j < b_size; ++j) fn(i + j, j);
      return;
    }
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t j = 0; j < b_size; ++j)
        for (std::size_t k = 0; k < inner; ++k) fn(i++, j);
  }
};

BroadcastPlan plan_broadcast(const Shape& a, const Shape& b, Broadcast mode, const char* op) {
  auto fail = [&] {
    throw ShapeError(std::string(op) + ": incompatible shapes " + to_string(a) + " and " + to_string(b));
  };
  BroadcastPlan plan;
  plan.b_size = numel(b);
  switch (mode) {
    case Broadcast::none:
      if (a != b) fail();
      break;
    case Broadcast::trailing:
      if (b.size() > a.size() || !std::equal(b.begin(), b.end(), a.end() - static_cast<std::ptrdiff_t>(b.size())))
        fail();
      plan.outer = plan.b_size ? numel(a) / plan.b_size : 0;
      break;
    case Broadcast::leading:
      if (b.size() > a.size() || !std::equal(b.begin(), b.end(), a.begin())) fail();
      plan.inner = plan.b_size ? numel(a) / plan.b_size : 0;
      break;
  }
  return plan;
}

template <typename Forward, typename GradA, typename GradB>
Var binary(const Var& a, const Var& b, Broadcast mode, const char* op, Forward f, GradA ga, GradB gb) {
  const BroadcastPlan plan = plan_broadcast(a.shape(), b.shape(), mode, op);
  Tensor out(a.shape());
  {
    const double* av = a.value().data().data();
    const double* bv = b.value().data().data();
    double* ov = out.data().data();
    plan.for_each([&](std::size_t i, std::size_t j) { ov[i] = f(av[i], bv[j]); });
  }
  return make_result(std::move(out), op, {&a, &b}, [plan, ga, gb](Node& self) {
    Node& na = *self.inputs[0];
    Node& nb = *self.inputs[1];
    const double* g = self.grad.data().data();
    const double* av = na.value.data().data();
    const double* bv = nb.value.data().data();
    if (wants_grad(na)) {
      double* dst = na.ensure_grad().data().data();
      plan.for_each([&](std::size_t i, std::size_t j) { dst[i] += ga(g[i], av[i], bv[j]); });
    }
    if (wants_grad(nb)) {
      double* dst = nb.ensure_grad().data().data();
      plan.for_each([&](std::size_t i, std::size_t j) { dst[j] += gb(g[i], av[i], bv[j]); });
    }
  });
}

template <typename Forward, typename Derivative>
Var unary(const Var& x, const char* op, Forward f, Derivative d) {
  Tensor out(x.shape());
  {
    auto xv = x.value().data();
    auto ov = out.data();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = f(xv[i]);
  }
  // d(x, y) receives the input and the output value.
  return make_result(std::move(out), op, {&x}, [d](Node& self) {
    Node& nx = *self.inputs[0];
    auto g = self.grad.data();
    auto xv = nx.value.data();
    auto yv = self.value.data();
    auto dst = nx.ensure_grad().data();
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * d(xv[i], yv[i]);
  });
}

void require_rank(const Var& v, std::size_t rank, const char* op) {
  if (v.shape().size() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                     to_string(v.shape()));
  }
}

// Splits a shape around `axis` into (outer, extent, inner) element counts.
struct AxisSplit {
  std::size_t outer = 1, extent = 1, inner = 1;
};

AxisSplit split_at(const Shape& s, std::size_t axis) {
  AxisSplit r;
  for (std::size_t i = 0; i < axis; ++i) r.outer *= s[i];
  r.extent = s[axis];
  for (std::size_t i = axis + 1; i < s.size(); ++i) r.inner *= s[i];
  return r;
}

}  // namespace

// Clamped to the nearest doubles inside (0, 1); unclamped, x above ~37 rounds to exactly 1.
double sigmoid(double x) {
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  if (x >= 0) return std::min(1.0 / (1.0 + std::exp(-x)), hi);
  const double e = std::exp(x);
  return std::max(e / (1.0 + e), lo);
}

Var matmul(const Var& a, const Var& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  if (b.shape()[0] != k) {
    throw ShapeError("matmul: inner dimensions differ, " + to_string(a.shape()) + " x " + to_string(b.shape()));
  }
  Tensor out({m, n});
  if (k > 0) as_matrix(out, m, n).noalias() = as_matrix(a.value(), m, k) * as_matrix(b.value(), k, n);
  return make_result(std::move(out), "matmul", {&a, &b}, [m, k, n](Node& self) {
    Node& na = *self.inputs[0];
    Node& nb = *self.inputs[1];
    if (k == 0) return;
    auto g = as_matrix(std::as_const(self.grad), m, n);
    if (wants_grad(na)) {
      as_matrix(na.ensure_grad(), m, k).noalias() += g * as_matrix(nb.value, k, n).transpose();
    }
    if (wants_grad(nb)) {
      as_matrix(nb.ensure_grad(), k, n).noalias() += as_matrix(na.value, m, k).transpose() * g;
    }
  });
}

Var add(const Var& a, const Var& b, Broadcast mode) {
  return binary(
      a, b, mode, "add", [](double x, double y) { return x + y; },
      [](double g, double, double) { return g; }, [](double g, double, double) { return g; });
}

Var sub(const Var& a, const Var& b, Broadcast mode) {
  return binary(
      a, b, mode, "sub", [](double x, double y) { return x - y; },
      [](double g, double, double) { return g; }, [](double g, double, double) { return -g; });
}

Var hadamard(const Var& a, const Var& b, Broadcast mode) {
  return binary(
      a, b, mode, "hadamard", [](double x, double y) { return x * y; },
      [](double g, double, double y) { return g * y; }, [](double g, double x, double) { return g * x; });
}

Var scale(const Var& x, double factor) {
  return unary(
      x, "scale", [factor](double v) { return v * factor; }, [factor](double, double) { return factor; });
}

Var add_scalar(const Var& x, double offset) {
  return unary(
      x, "add_scalar", [offset](double v) { return v + offset; }, [](double, double) { return 1.0; });
}

Var one_minus(const Var& x) {
  return unary(
      x, "one_minus", [](double v) { return 1.0 - v; }, [](double, double) { return -1.0; });
}

Var sigmoid(const Var& x) {
  return unary(
      x, "sigmoid", [](double v) { return sigmoid(v); }, [](double, double y) { return y * (1.0 - y); });
}

Var tanh(const Var& x) {
  return unary(
      x, "tanh", [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Var relu(const Var& x) {
  return unary(
      x, "relu", [](double v) { return v > 0.0 ? v : 0.0; }, [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var concat(std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Shape& first = parts[0].shape();
  if (axis >= first.size()) {
    throw ShapeError("concat: axis " + std::to_string(axis) + " out of range for " + to_string(first));
  }
  Shape out_shape = first;
  out_shape[axis] = 0;
  for (const Var& p : parts) {
    const Shape& s = p.shape();
    bool ok = s.size() == first.size();
    for (std::size_t i = 0; ok && i < s.size(); ++i) ok = (i == axis) || s[i] == first[i];
    if (!ok) throw ShapeError("concat: mismatched shapes " + to_string(first) + " and " + to_string(s));
    out_shape[axis] += s[axis];
  }
  const AxisSplit outer_split = split_at(out_shape, axis);
  std::vector<std::size_t> offsets;  // per part, offset along axis in units of `inner`
  Tensor out(out_shape);
  {
    std::size_t offset = 0;
    auto ov = out.data();
    for (const Var& p : parts) {
      offsets.push_back(offset);
      const std::size_t chunk = p.shape()[axis] * outer_split.inner;
      const std::size_t row = outer_split.extent * outer_split.inner;
      auto pv = p.value().data();
      for (std::size_t o = 0; o < outer_split.outer; ++o) {
        std::copy_n(pv.begin() + static_cast<std::ptrdiff_t>(o * chunk), chunk,
                    ov.begin() + static_cast<std::ptrdiff_t>(o * row + offset));
      }
      offset += chunk;
    }
  }
  return make_result(std::move(out), "concat", parts, [outer_split, offsets](Node& self) {
    auto g = self.grad.data();
    const std::size_t row = outer_split.extent * outer_split.inner;
    for (std::size_t p = 0; p < self.inputs.size(); ++p) {
      Node& np = *self.inputs[p];
      if (!wants_grad(np)) continue;
      const std::size_t chunk = np.value.size() / (outer_split.outer ? outer_split.outer : 1);
      auto dst = np.ensure_grad().data();
      for (std::size_t o = 0; o < outer_split.outer; ++o)
        for (std::size_t i = 0; i < chunk; ++i) dst[o * chunk + i] += g[o * row + offsets[p] + i];
    }
  });
}

Var slice(const Var& x, std::size_t axis, std::size_t begin, std::size_t end) {
  const Shape& s = x.shape();
  if (axis >= s.size() || begin > end || end > s[axis]) {
    throw ShapeError("slice: range [" + std::to_string(begin) + "," + std::to_string(end) + ") on axis " +
                     std::to_string(axis) + " invalid for " + to_string(s));
  }
  const AxisSplit split = split_at(s, axis);
  Shape out_shape = s;
  out_shape[axis] = end - begin;
  Tensor out(out_shape);
  const std::size_t chunk = (end - begin) * split.inner;
  const std::size_t row = split.extent * split.inner;
  const std::size_t start = begin * split.inner;
  {
    auto xv = x.value().data();
    auto ov = out.data();
    for (std::size_t o = 0; o < split.outer; ++o)
      std::copy_n(xv.begin() + static_cast<std::ptrdiff_t>(o * row + start), chunk,
                  ov.begin() + static_cast<std::ptrdiff_t>(o * chunk));
  }
  return make_result(std::move(out), "slice", {&x}, [split, chunk, row, start](Node& self) {
    auto g = self.grad.data();
    auto dst = self.inputs[0]->ensure_grad().data();
    for (std::size_t o = 0; o < split.outer; ++o)
      for (std::size_t i = 0; i < chunk; ++i) dst[o * row + start + i] += g[o * chunk + i];
  });
}

Var reshape(const Var& x, Shape shape) {
  Tensor out = x.value().reshaped(std::move(shape));
  return make_result(std::move(out), "reshape", {&x}, [](Node& self) {
    auto g = self.grad.data();
    auto dst = self.inputs[0]->ensure_grad().data();
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
  });
}

Var sum(const Var& x) {
  double total = 0.0;
  for (double v : x.value().data()) total += v;
  return make_result(Tensor::scalar(total), "sum", {&x}, [](Node& self) {
    const double g = self.grad[0];
    for (double& d : self.inputs[0]->ensure_grad().data()) d += g;
  });
}

Var sum(const Var& x, std::size_t axis) {
  const Shape& s = x.shape();
  if (axis >= s.size()) {
    throw ShapeError("sum: axis " + std::to_string(axis) + " out of range for " + to_string(s));
  }
  const AxisSplit split = split_at(s, axis);
  Shape out_shape = s;
  out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
  Tensor out(out_shape);
  {
    auto xv = x.value().data();
    auto ov = out.data();
    for (std::size_t o = 0; o < split.outer; ++o)
      for (std::size_t e = 0; e < split.extent; ++e)
        for (std::size_t i = 0; i < split.inner; ++i)
          ov[o * split.inner + i] += xv[(o * split.extent + e) * split.inner + i];
  }
  return make_result(std::move(out), "sum_axis", {&x}, [split](Node& self) {
    auto g = self.grad.data();
    auto dst = self.inputs[0]->ensure_grad().data();
    for (std::size_t o = 0; o < split.outer; ++o)
      for (std::size_t e = 0; e < split.extent; ++e)
        for (std::size_t i = 0; i < split.inner; ++i)
          dst[(o * split.extent + e) * split.inner + i] += g[o * split.inner + i];
  });
}

Var mean(const Var& x) {
  const std::size_t n = x.value().size();
  if (n == 0) throw ShapeError("mean of an empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(n));
}

Var mean(const Var& x, std::size_t axis) {
  if (axis >= x.shape().size()) {
    throw ShapeError("mean: axis " + std::to_string(axis) + " out of range for " + to_string(x.shape()));
  }
  const std::size_t extent = x.shape()[axis];
  if (extent == 0) throw ShapeError("mean over an empty axis");
  return scale(sum(x, axis), 1.0 / static_cast<double>(extent));
}

Var propagate(const Tensor& adj, const Var& x, std::size_t group_rows) {
  require_rank(x, 2, "propagate");
  if (adj.rank() != 2 || adj.shape()[0] != adj.shape()[1]) {
    throw ShapeError("propagate: adjacency must be square, got " + to_string(adj.shape()));
  }
  const std::size_t n = adj.shape()[0];
  const std::size_t rows = x.shape()[0], d = x.shape()[1];
  const std::size_t group = group_rows ? group_rows : rows;
  if (n == 0 || group == 0 || rows % group != 0 || group % n != 0) {
    throw ShapeError("propagate: " + to_string(x.shape()) + " is not a stack of " + std::to_string(group) +
                     "-row groups over " + std::to_string(n) + " nodes");
  }
  const std::size_t groups = rows / group, width = group / n * d;
  Tensor out({rows, d});
  const auto a = as_matrix(adj, n, n);
  for (std::size_t g = 0; g < groups; ++g) {
    MatMap og(out.data().data() + g * n * width, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));
    og.noalias() = a * ConstMatMap(x.value().data().data() + g * n * width, static_cast<Eigen::Index>(n),
                                   static_cast<Eigen::Index>(width));
  }
  return make_result(std::move(out), "propagate", {&x}, [adj, n, width, groups](Node& self) {
    const auto a = as_matrix(adj, n, n);
    Tensor& gx = self.inputs[0]->ensure_grad();
    for (std::size_t g = 0; g < groups; ++g) {
      MatMap dst(gx.data().data() + g * n * width, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));
      dst.noalias() += a.transpose() * ConstMatMap(self.grad.data().data() + g * n * width,
                                                   static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));
    }
  });
}

namespace {

struct GruShapes {
  std::size_t rows, hidden, offset;  // offset: first row of the step inside gates
};

GruShapes check_gru(const Var& gates, std::size_t step, const Var& hidden_proj, const Var& h, const char* op) {
  require_rank(gates, 2, op);
  require_rank(hidden_proj, 2, op);
  require_rank(h, 2, op);
  const std::size_t rows = h.shape()[0], hd = h.shape()[1];
  if (gates.shape()[1] != 3 * hd || hidden_proj.shape() != Shape{rows, 2 * hd} || (step + 1) * rows > gates.shape()[0]) {
    throw ShapeError(std::string(op) + ": gates " + to_string(gates.shape()) + ", hidden projection " +
                     to_string(hidden_proj.shape()) + " and state " + to_string(h.shape()) + " do not fit step " +
                     std::to_string(step));
  }
  return {rows, hd, step * rows};
}

}  // namespace

Var gru_reset_hidden(const Var& gates, std::size_t step, const Var& hidden_proj, const Var& h) {
  const GruShapes s = check_gru(gates, step, hidden_proj, h, "gru_reset_hidden");
  const std::size_t hd = s.hidden;
  Tensor out({s.rows, hd});
  Tensor reset({s.rows, hd});
  {
    const double* gv = gates.value().data().data() + s.offset * 3 * hd;
    const double* pv = hidden_proj.value().data().data();
    const double* hv = h.value().data().data();
    double* ov = out.data().data();
    double* rv = reset.data().data();
    for (std::size_t i = 0; i < s.rows; ++i)
      for (std::size_t j = 0; j < hd; ++j) {
        const double r = sigmoid(gv[i * 3 * hd + hd + j] + pv[i * 2 * hd + hd + j]);
        rv[i * hd + j] = r;
        ov[i * hd + j] = r * hv[i * hd + j];
      }
  }
  return make_result(std::move(out), "gru_reset_hidden", {&gates, &hidden_proj, &h},
                     [s, reset = std::move(reset)](Node& self) {
    Node& ng = *self.inputs[0];
    Node& np = *self.inputs[1];
    Node& nh = *self.inputs[2];
    const std::size_t hd = s.hidden;
    const double* rv = reset.data().data();
    const double* hv = nh.value.data().data();
    const double* go = self.grad.data().data();
    double* dg = wants_grad(ng) ? ng.ensure_grad().data().data() + s.offset * 3 * hd : nullptr;
    double* dp = wants_grad(np) ? np.ensure_grad().data().data() : nullptr;
    double* dh = wants_grad(nh) ? nh.ensure_grad().data().data() : nullptr;
    for (std::size_t i = 0; i < s.rows; ++i)
      for (std::size_t j = 0; j < hd; ++j) {
        const double r = rv[i * hd + j];
        const double g = go[i * hd + j];
        const double dpre = g * hv[i * hd + j] * r * (1.0 - r);
        if (dg) dg[i * 3 * hd + hd + j] += dpre;
        if (dp) dp[i * 2 * hd + hd + j] += dpre;
        if (dh) dh[i * hd + j] += g * r;
      }
  });
}

Var gru_update(const Var& gates, std::size_t step, const Var& hidden_proj, const Var& candidate_proj, const Var& h) {
  const GruShapes s = check_gru(gates, step, hidden_proj, h, "gru_update");
  if (candidate_proj.shape() != h.shape()) {
    throw ShapeError("gru_update: candidate projection " + to_string(candidate_proj.shape()) + " vs state " +
                     to_string(h.shape()));
  }
  const std::size_t hd = s.hidden;
  Tensor out({s.rows, hd});
  Tensor update({s.rows, hd});
  Tensor cand({s.rows, hd});
  {
    const double* gv = gates.value().data().data() + s.offset * 3 * hd;
    const double* pv = hidden_proj.value().data().data();
    const double* cv = candidate_proj.value().data().data();
    const double* hv = h.value().data().data();
    double* ov = out.data().data();
    double* zv = update.data().data();
    double* nv = cand.data().data();
    for (std::size_t i = 0; i < s.rows; ++i)
      for (std::size_t j = 0; j < hd; ++j) {
        const double z = sigmoid(gv[i * 3 * hd + j] + pv[i * 2 * hd + j]);
        const double c = std::tanh(gv[i * 3 * hd + 2 * hd + j] + cv[i * hd + j]);
        zv[i * hd + j] = z;
        nv[i * hd + j] = c;
        ov[i * hd + j] = z * hv[i * hd + j] + (1.0 - z) * c;
      }
  }
  return make_result(std::move(out), "gru_update", {&gates, &hidden_proj, &candidate_proj, &h},
                     [s, update = std::move(update), cand = std::move(cand)](Node& self) {
    Node& ng = *self.inputs[0];
    Node& np = *self.inputs[1];
    Node& nc = *self.inputs[2];
    Node& nh = *self.inputs[3];
    const std::size_t hd = s.hidden;
    const double* zv = update.data().data();
    const double* nv = cand.data().data();
    const double* hv = nh.value.data().data();
    const double* go = self.grad.data().data();
    double* dg = wants_grad(ng) ? ng.ensure_grad().data().data() + s.offset * 3 * hd : nullptr;
    double* dp = wants_grad(np) ? np.ensure_grad().data().data() : nullptr;
    double* dc = wants_grad(nc) ? nc.ensure_grad().data().data() : nullptr;
    double* dh = wants_grad(nh) ? nh.ensure_grad().data().data() : nullptr;
    for (std::size_t i = 0; i < s.rows; ++i)
      for (std::size_t j = 0; j < hd; ++j) {
        const double z = zv[i * hd + j];
        const double c = nv[i * hd + j];
        const double g = go[i * hd + j];
        const double dz = g * (hv[i * hd + j] - c) * z * (1.0 - z);
        const double dcand = g * (1.0 - z) * (1.0 - c * c);
        if (dg) {
          dg[i * 3 * hd + j] += dz;
          dg[i * 3 * hd + 2 * hd + j] += dcand;
        }
        if (dp) dp[i * 2 * hd + j] += dz;
        if (dc) dc[i * hd + j] += dcand;
        if (dh) dh[i * hd + j] += g * z;
      }
  });
}

Var lstm_step(const Var& gates, std::size_t step, const Var& hidden_proj, const Var& c) {
  require_rank(gates, 2, "lstm_step");
  require_rank(hidden_proj, 2, "lstm_step");
  require_rank(c, 2, "lstm_step");
  const std::size_t rows = c.shape()[0], hd = c.shape()[1], offset = step * rows;
  if (gates.shape()[1] != 4 * hd || hidden_proj.shape() != Shape{rows, 4 * hd} || (step + 1) * rows > gates.shape()[0]) {
    throw ShapeError("lstm_step: gates " + to_string(gates.shape()) + ", hidden projection " +
                     to_string(hidden_proj.shape()) + " and cell " + to_string(c.shape()) + " do not fit step " +
                     std::to_string(step));
  }
  Tensor out({rows, 2 * hd});
  Tensor acts({rows, 5 * hd});  // i, f, g, o, tanh(c_new)
  {
    const double* gv = gates.value().data().data() + offset * 4 * hd;
    const double* pv = hidden_proj.value().data().data();
    const double* cv = c.value().data().data();
    double* ov = out.data().data();
    double* av = acts.data().data();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* pre_g = gv + r * 4 * hd;
      const double* pre_h = pv + r * 4 * hd;
      double* a = av + r * 5 * hd;
      for (std::size_t j = 0; j < hd; ++j) {
        const double i = sigmoid(pre_g[j] + pre_h[j]);
        const double f = sigmoid(pre_g[hd + j] + pre_h[hd + j]);
        const double g = std::tanh(pre_g[2 * hd + j] + pre_h[2 * hd + j]);
        const double o = sigmoid(pre_g[3 * hd + j] + pre_h[3 * hd + j]);
        const double cn = f * cv[r * hd + j] + i * g;
        const double tc = std::tanh(cn);
        a[j] = i;
        a[hd + j] = f;
        a[2 * hd + j] = g;
        a[3 * hd + j] = o;
        a[4 * hd + j] = tc;
        ov[r * 2 * hd + j] = o * tc;
        ov[r * 2 * hd + hd + j] = cn;
      }
    }
  }
  return make_result(std::move(out), "lstm_step", {&gates, &hidden_proj, &c},
                     [rows, hd, offset, acts = std::move(acts)](Node& self) {
    Node& ng = *self.inputs[0];
    Node& np = *self.inputs[1];
    Node& nc = *self.inputs[2];
    const double* av = acts.data().data();
    const double* cv = nc.value.data().data();
    const double* go = self.grad.data().data();
    double* dg = wants_grad(ng) ? ng.ensure_grad().data().data() + offset * 4 * hd : nullptr;
    double* dp = wants_grad(np) ? np.ensure_grad().data().data() : nullptr;
    double* dc = wants_grad(nc) ? nc.ensure_grad().data().data() : nullptr;
    for (std::size_t r = 0; r < rows; ++r) {
      const double* a = av + r * 5 * hd;
      for (std::size_t j = 0; j < hd; ++j) {
        const double i = a[j], f = a[hd + j], g = a[2 * hd + j], o = a[3 * hd + j], tc = a[4 * hd + j];
        const double dh = go[r * 2 * hd + j];
        const double dcn = go[r * 2 * hd + hd + j] + dh * o * (1.0 - tc * tc);
        const double d[4] = {dcn * g * i * (1.0 - i), dcn * cv[r * hd + j] * f * (1.0 - f), dcn * i * (1.0 - g * g),
                             dh * tc * o * (1.0 - o)};
        for (std::size_t k = 0; k < 4; ++k) {
          if (dg) dg[r * 4 * hd + k * hd + j] += d[k];
          if (dp) dp[r * 4 * hd + k * hd + j] += d[k];
        }
        if (dc) dc[r * hd + j] += dcn * f;
      }
    }
  });
}

Var replicate_sum(const Var& per_sample, const Var& per_node, std::size_t steps) {
  require_rank(per_sample, 2, "replicate_sum");
  require_rank(per_node, 2, "replicate_sum");
  const std::size_t k = per_sample.shape()[1], nodes = per_node.shape()[0];
  if (steps == 0 || per_sample.shape()[0] % steps != 0 || per_node.shape()[1] != k) {
    throw ShapeError("replicate_sum: " + to_string(per_sample.shape()) + " over " + std::to_string(steps) +
                     " steps with per-node " + to_string(per_node.shape()));
  }
  const std::size_t b = per_sample.shape()[0] / steps;
  Tensor out({steps * nodes * b, k});
  const double* tv = per_sample.value().data().data();
  const double* nv = per_node.value().data().data();
  double* ov = out.data().data();
  for (std::size_t p = 0; p < steps; ++p)
    for (std::size_t i = 0; i < nodes; ++i)
      for (std::size_t s = 0; s < b; ++s) {
        const double* t = tv + (p * b + s) * k;
        const double* n = nv + i * k;
        double* o = ov + ((p * nodes + i) * b + s) * k;
        for (std::size_t j = 0; j < k; ++j) o[j] = t[j] + n[j];
      }
  return make_result(std::move(out), "replicate_sum", {&per_sample, &per_node}, [steps, nodes, b, k](Node& self) {
    Node& nt = *self.inputs[0];
    Node& nn = *self.inputs[1];
    double* dt = wants_grad(nt) ? nt.ensure_grad().data().data() : nullptr;
    double* dn = wants_grad(nn) ? nn.ensure_grad().data().data() : nullptr;
    const double* go = self.grad.data().data();
    for (std::size_t p = 0; p < steps; ++p)
      for (std::size_t i = 0; i < nodes; ++i)
        for (std::size_t s = 0; s < b; ++s) {
          const double* g = go + ((p * nodes + i) * b + s) * k;
          for (std::size_t j = 0; j < k; ++j) {
            if (dt) dt[(p * b + s) * k + j] += g[j];
            if (dn) dn[i * k + j] += g[j];
          }
        }
  });
}

Var mse(const Var& prediction, const Var& target) {
  if (prediction.shape() != target.shape()) {
    throw ShapeError("mse: shapes differ, " + to_string(prediction.shape()) + " vs " + to_string(target.shape()));
  }
  const Var diff = sub(prediction, target);
  return mean(hadamard(diff, diff));
}

}  // namespace ctxbench::ad
