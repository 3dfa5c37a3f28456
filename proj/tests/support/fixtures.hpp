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

#include <filesystem>
#include <string>
#include <vector>

namespace ctxbench::testing {

// Reference per-dataset metric values with the printed average for each method.
struct MetricGroup {
  std::string label;
  std::vector<std::string> methods;
  std::vector<std::string> datasets;
  std::vector<std::vector<double>> values;  // [method][dataset]
  std::vector<double> printed;              // [method]
};

std::filesystem::path fixture_dir();
std::vector<MetricGroup> load_metric_groups(const std::filesystem::path& file);

struct AvgMismatch {
  std::string group, method;
  double computed = 0.0, printed = 0.0;
};

// Recomputes every group's averages and returns the entries off by more than `tolerance`.
std::vector<AvgMismatch> check_printed_averages(const std::vector<MetricGroup>& groups, double tolerance = 1e-3);

}  // namespace ctxbench::testing
