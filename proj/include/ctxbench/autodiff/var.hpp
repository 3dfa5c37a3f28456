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

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ctxbench/autodiff/tensor.hpp"

namespace ctxbench::ad {

// One operation record in a computation graph. Nodes only keep references to
// their inputs when gradient tracking is on, so constant subgraphs are freed eagerly.
struct Node {
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  bool is_leaf = true;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward_fn;

  // Adds `g` into this node's gradient, allocating it on first use.
  void accumulate(const Tensor& g);
  Tensor& ensure_grad();
};

// Handle to a graph node. Cheap to copy; copies alias the same node.
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Var constant(Tensor value);
  static Var parameter(Tensor value);

  const Tensor& value() const { return node_->value; }
  Tensor& mutable_value() { return node_->value; }
  // Gradient after backward(); zeros when this node was never reached.
  const Tensor& grad() const { return node_->ensure_grad(); }
  Tensor& mutable_grad() { return node_->ensure_grad(); }
  const Shape& shape() const { return node_->value.shape(); }
  bool requires_grad() const { return node_->requires_grad; }
  void zero_grad();

  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& shared() const { return node_; }
  explicit operator bool() const { return static_cast<bool>(node_); }

 private:
  std::shared_ptr<Node> node_;
};

// Reverse-mode sweep from a single-element loss. Each reachable node is visited once in
// reverse topological order; parameter gradients accumulate, intermediate ones are reset.
void backward(const Var& loss);

// Number of distinct nodes reachable from `root` that take part in differentiation.
std::size_t graph_size(const Var& root);

}  // namespace ctxbench::ad
