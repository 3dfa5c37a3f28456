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
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ctxbench/bench/config.hpp"
#include "ctxbench/bench/results.hpp"

namespace ctxbench::bench {

struct GridCell {
  std::string technique;  // label
  std::string features;   // canonical label, "None" without context
  std::uint64_t seed = 0;
};

// technique x features x seed; NoContext ignores features and appears once per seed.
std::vector<GridCell> expand_grid(const ExperimentConfig& config);

// config.out_dir unless the CTXBENCH_OUT environment variable is set.
std::filesystem::path output_dir(const ExperimentConfig& config);

struct GridSummary {
  std::size_t planned = 0;
  std::size_t skipped = 0;    // already present in the results file
  std::size_t completed = 0;
  std::size_t failed = 0;     // recorded in failures.log
  std::filesystem::path results;
  std::filesystem::path failures;
};

using ProgressFn = std::function<void(const GridCell&, const std::string& outcome)>;

// Runs every missing cell on `config.workers` threads over one shared prepared dataset.
// Completed rows are appended to <out>/results.csv by the calling thread only; a cell
// that throws is logged to <out>/failures.log and the grid continues.
GridSummary run_grid(const ExperimentConfig& config, const ProgressFn& progress = {});

}  // namespace ctxbench::bench
