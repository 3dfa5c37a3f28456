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

#include "ctxbench/autodiff/var.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>
#include <utility>

namespace ctxbench::ad {

Tensor& Node::ensure_grad() {
  if (grad.shape() != value.shape()) grad = Tensor(value.shape());
  return grad;
}

void Node::accumulate(const Tensor& g) {
  Tensor& dst = ensure_grad();
  auto out = dst.data();
  auto in = g.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += in[i];
}

Var Var::constant(Tensor value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return Var(std::move(node));
}

Var Var::parameter(Tensor value) {
  if (!value.all_finite()) throw NumericError("parameter initialised with non-finite values");
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  node->ensure_grad();
  return Var(std::move(node));
}

void Var::zero_grad() { node_->ensure_grad().fill(0.0); }

namespace {

// Post-order DFS without recursion; recurrent unrolls produce deep graphs.
std::vector<Node*> topological_order(Node* root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  if (!root->requires_grad) return order;
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

}  // namespace

void backward(const Var& loss) {
  if (loss.value().size() != 1) {
    throw ShapeError("backward() needs a scalar loss, got shape " + to_string(loss.shape()));
  }
  if (!loss.value().all_finite()) throw NumericError("backward() on a non-finite loss");
  Node* root = loss.node();
  auto order = topological_order(root);
  for (Node* n : order) {
    if (!n->is_leaf) n->ensure_grad().fill(0.0);
  }
  if (order.empty()) return;
  root->ensure_grad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->is_leaf || !n->backward_fn) continue;
    n->backward_fn(*n);
  }
}

std::size_t graph_size(const Var& root) { return topological_order(root.node()).size(); }

}  // namespace ctxbench::ad
