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

#include <cstdint>
#include <random>

#include "ctxbench/autodiff/tensor.hpp"

namespace ctxbench {

// All randomness in a run flows from one 64-bit seed; independent streams are derived
// with splitmix64 so adding a consumer does not shift the others.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi);
  double normal(double mean, double stddev);
  std::uint64_t next() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

  // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] over the given shape.
  ad::Tensor fan_in_uniform(ad::Shape shape, std::size_t fan_in);

 private:
  std::mt19937_64 engine_;
};

}  // namespace ctxbench
