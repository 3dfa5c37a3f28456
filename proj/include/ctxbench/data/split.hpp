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

namespace ctxbench::data {

struct SplitSpec {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;

  void validate() const;  // positive fractions summing to 1
};

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
};

struct SplitRanges {
  IndexRange train, validation, test;
};

// Contiguous [0,a), [a,b), [b,steps). first_target is the earliest index whose full window
// history exists; the training range must reach past it or no sample could be formed.
SplitRanges chronological_split(std::size_t steps, const SplitSpec& spec, std::size_t first_target = 0);

}  // namespace ctxbench::data
