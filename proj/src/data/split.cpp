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

#include "ctxbench/data/split.hpp"

#include <cmath>
#include <string>

#include "ctxbench/data/csv.hpp"

namespace ctxbench::data {

void SplitSpec::validate() const {
  for (double f : {train, validation, test}) {
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw DataError("split fractions must all be positive, got " + std::to_string(train) + "/" +
                      std::to_string(validation) + "/" + std::to_string(test));
    }
  }
  if (std::abs(train + validation + test - 1.0) > 1e-9) throw DataError("split fractions must sum to 1");
}

SplitRanges chronological_split(std::size_t steps, const SplitSpec& spec, std::size_t first_target) {
  spec.validate();
  const auto a = static_cast<std::size_t>(std::llround(static_cast<double>(steps) * spec.train));
  const auto b = static_cast<std::size_t>(std::llround(static_cast<double>(steps) * (spec.train + spec.validation)));
  SplitRanges out{{0, a}, {a, b}, {b, steps}};
  if (out.validation.size() == 0 || out.test.size() == 0 || out.train.size() == 0) {
    throw DataError(std::to_string(steps) + " intervals are too few for a non-empty train/validation/test split");
  }
  if (out.train.end <= first_target) {
    throw DataError("window span error: training range [0," + std::to_string(out.train.end) +
                    ") ends before the first interval with full window history (" + std::to_string(first_target) + ")");
  }
  return out;
}

}  // namespace ctxbench::data
