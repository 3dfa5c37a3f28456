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

#include "ctxbench/model/window.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ctxbench::model {

std::vector<std::size_t> WindowSpec::lags() const {
  std::vector<std::size_t> out;
  out.reserve(steps());
  const std::size_t day = slots_per_day(), week = 7 * day;
  for (std::size_t k = closeness; k >= 1; --k) out.push_back(k);
  for (std::size_t k = daily; k >= 1; --k) out.push_back(k * day);
  for (std::size_t k = weekly; k >= 1; --k) out.push_back(k * week);
  return out;
}

std::size_t WindowSpec::first_valid_index() const {
  const auto l = lags();
  return l.empty() ? 0 : *std::max_element(l.begin(), l.end());
}

std::vector<std::size_t> WindowSpec::time_order() const {
  const auto l = lags();
  std::vector<std::size_t> order(l.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return l[a] > l[b]; });
  return order;
}

WindowSamples window_samples(std::size_t series_steps, const WindowSpec& spec, data::IndexRange range) {
  if (spec.steps() == 0) throw std::invalid_argument("window has no steps");
  if (range.end > series_steps) throw std::invalid_argument("sample range exceeds the series");
  WindowSamples out;
  const std::size_t first = spec.first_valid_index();
  for (std::size_t t = range.begin; t < range.end; ++t) {
    if (t < first) {
      ++out.skipped;
    } else {
      out.targets.push_back(t);
    }
  }
  if (out.targets.empty()) {
    throw std::invalid_argument("range [" + std::to_string(range.begin) + "," + std::to_string(range.end) +
                                ") has no target with full window history (first valid index " +
                                std::to_string(first) + ")");
  }
  return out;
}

Batch make_batch(const ad::Tensor& flow, const enc::ContextBundle* context, const WindowSpec& spec,
                 std::span<const std::size_t> targets) {
  const std::size_t n = flow.dim(1), b = targets.size(), p = spec.steps();
  const std::size_t et = context ? context->temporal_width() : 0;
  const std::size_t es = context ? context->spatial_width() : 0;
  const std::size_t f = et + es;
  const auto lags = spec.lags();
  Batch out;
  out.samples = b;
  out.nodes = n;
  out.flow = ad::Tensor({p, b * n, 1});
  out.context = ad::Tensor({p, b * n, f});
  out.target = ad::Tensor({b * n, 1});
  for (std::size_t s = 0; s < b; ++s) {
    const std::size_t t = targets[s];
    if (t < spec.first_valid_index() || t >= flow.dim(0)) throw std::out_of_range("target index without full window");
    for (std::size_t i = 0; i < n; ++i) out.target.at(i * b + s, 0) = flow.at(t, i);
    for (std::size_t k = 0; k < p; ++k) {
      const std::size_t src = t - lags[k];
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t row = i * b + s;
        out.flow.at(k, row, 0) = flow.at(src, i);
        for (std::size_t c = 0; c < et; ++c) out.context.at(k, row, c) = context->temporal.values.at(src, c);
        for (std::size_t c = 0; c < es; ++c) out.context.at(k, row, et + c) = context->spatial.values.at(i, c);
      }
    }
  }
  return out;
}

}  // namespace ctxbench::model
