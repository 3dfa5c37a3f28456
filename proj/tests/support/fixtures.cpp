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

#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "ctxbench/data/csv.hpp"
#include "ctxbench/train/train.hpp"

namespace ctxbench::testing {

namespace {

std::size_t index_of(std::vector<std::string>& list, const std::string& v) {
  const auto it = std::find(list.begin(), list.end(), v);
  if (it != list.end()) return static_cast<std::size_t>(it - list.begin());
  list.push_back(v);
  return list.size() - 1;
}

}  // namespace

std::filesystem::path fixture_dir() { return CTXBENCH_FIXTURE_DIR; }

std::vector<MetricGroup> load_metric_groups(const std::filesystem::path& file) {
  const auto table = data::read_csv(file);
  const auto c_group = table.require_column("group");
  const auto c_method = table.require_column("method");
  const auto c_dataset = table.require_column("dataset");
  const auto c_value = table.require_column("value");
  const auto c_avg = table.require_column("printed_avg");

  std::vector<MetricGroup> groups;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto g = std::find_if(groups.begin(), groups.end(), [&](const MetricGroup& x) { return x.label == row[c_group]; });
    if (g == groups.end()) {
      groups.push_back({row[c_group], {}, {}, {}, {}});
      g = groups.end() - 1;
    }
    const auto m = index_of(g->methods, row[c_method]);
    const auto d = index_of(g->datasets, row[c_dataset]);
    if (g->values.size() <= m) {
      g->values.resize(m + 1);
      g->printed.resize(m + 1, NAN);
    }
    if (g->values[m].size() <= d) g->values[m].resize(d + 1, NAN);
    g->values[m][d] = data::parse_double(table, r, c_value);
    g->printed[m] = data::parse_double(table, r, c_avg);
  }
  for (const auto& g : groups) {
    for (const auto& row : g.values) {
      if (row.size() != g.datasets.size() || std::any_of(row.begin(), row.end(), [](double v) { return std::isnan(v); }))
        throw std::runtime_error(file.string() + ": group " + g.label + " is missing a dataset value");
    }
  }
  return groups;
}

std::vector<AvgMismatch> check_printed_averages(const std::vector<MetricGroup>& groups, double tolerance) {
  std::vector<AvgMismatch> out;
  for (const auto& g : groups) {
    const auto avg = train::avg_normalized(g.values);
    for (std::size_t m = 0; m < g.methods.size(); ++m) {
      if (!(std::abs(avg[m] - g.printed[m]) <= tolerance)) out.push_back({g.label, g.methods[m], avg[m], g.printed[m]});
    }
  }
  return out;
}

}  // namespace ctxbench::testing
