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

#include <optional>
#include <string>
#include <vector>

#include "ctxbench/bench/results.hpp"

namespace ctxbench::bench {

// Seed-mean metrics of one interval. Methods are "NoContext" or "technique (features)",
// baseline first. avgN entries are empty for methods missing a dataset.
struct ReportTable {
  int interval = 0;
  std::vector<std::string> methods;
  std::vector<std::string> datasets;
  std::vector<std::vector<std::optional<double>>> rmse, mae;  // [method][dataset]
  std::vector<std::optional<double>> avg_rmse, avg_mae;
  bool has_baseline = false;  // NoContext covers every dataset
};

std::vector<ReportTable> summarize(const std::vector<ResultRow>& rows);

struct Report {
  std::string markdown;
  std::vector<std::string> warnings;
};

// One table per interval: methods as rows, per-dataset seed-mean RMSE and MAE as columns,
// then avgNRMSE and avgNMAE over the methods that cover every dataset. Column minima are
// bold; avgN values below the NoContext baseline carry a trailing '*'.
Report emit_report(const std::vector<ResultRow>& rows);

struct OverheadRow {
  std::string technique;
  std::size_t pairs = 0;        // runs matched to a NoContext run on the same dataset, interval and seed
  double mean_seconds = 0.0;
  double ratio = 0.0;           // mean over pairs of seconds / NoContext seconds
};

// Throws std::invalid_argument when no NoContext run exists. NoContext comes first.
std::vector<OverheadRow> measure_overhead(const std::vector<ResultRow>& rows);
std::string format_overhead(const std::vector<OverheadRow>& table);

// Seed-mean RMSE of every swept technique against its context width, one table per
// dataset and interval. Empty when the results hold no technique at two or more widths.
std::string emit_sweep_table(const std::vector<ResultRow>& rows);

}  // namespace ctxbench::bench
