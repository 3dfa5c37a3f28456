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

#include "ctxbench/model/params.hpp"

#include <stdexcept>

namespace ctxbench::model {

ad::Var ParamStore::weight(const std::string& name, std::size_t rows, std::size_t cols) {
  return tensor(name, rng_.fan_in_uniform({rows, cols}, rows));
}

ad::Var ParamStore::bias(const std::string& name, std::size_t size, double value) {
  return tensor(name, ad::Tensor({size}, value));
}

ad::Var ParamStore::tensor(const std::string& name, ad::Tensor value) {
  params_.push_back(ad::Var::parameter(std::move(value)));
  names_.push_back(name);
  return params_.back();
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value().size();
  return n;
}

std::vector<ad::Tensor> ParamStore::snapshot() const {
  std::vector<ad::Tensor> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.value());
  return out;
}

void ParamStore::restore(const std::vector<ad::Tensor>& values) {
  if (values.size() != params_.size()) throw std::invalid_argument("parameter snapshot has the wrong length");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].shape() != params_[i].shape()) throw ad::ShapeError("parameter snapshot shape mismatch for " + names_[i]);
    params_[i].mutable_value() = values[i];
  }
}

}  // namespace ctxbench::model
