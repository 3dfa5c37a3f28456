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
#include <string>
#include <vector>

#include "ctxbench/autodiff/var.hpp"
#include "ctxbench/core/random.hpp"

namespace ctxbench::model {

// Owns the trainable tensors of one model. Creation order fixes the random draws, so a
// seed reproduces the same initialization.
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t seed) : rng_(seed) {}

  // [rows x cols] uniform in +-1/sqrt(rows).
  ad::Var weight(const std::string& name, std::size_t rows, std::size_t cols);
  ad::Var bias(const std::string& name, std::size_t size, double value = 0.0);
  ad::Var tensor(const std::string& name, ad::Tensor value);

  const std::vector<ad::Var>& all() const { return params_; }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t scalar_count() const;

  std::vector<ad::Tensor> snapshot() const;
  void restore(const std::vector<ad::Tensor>& values);

 private:
  Rng rng_;
  std::vector<ad::Var> params_;
  std::vector<std::string> names_;
};

}  // namespace ctxbench::model
