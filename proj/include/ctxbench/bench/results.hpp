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
#include <string>
#include <vector>

namespace ctxbench::bench {

struct ResultRow {
  std::string dataset;
  int interval = 0;
  std::string technique;  // label, including any width suffix
  std::string features;   // canonical feature label; "None" for NoContext
  std::uint64_t seed = 0;
  double rmse = 0.0;
  double mae = 0.0;
  double train_seconds = 0.0;
  std::size_t epochs_run = 0;

  // Identity of the grid cell that produced the row.
  std::string key() const;
};

inline constexpr const char* kResultsHeader = "dataset,interval,technique,features,seed,rmse,mae,train_seconds,epochs_run";

// Missing file -> no rows. Validates the header and every field.
std::vector<ResultRow> read_results(const std::filesystem::path& path);
// Appends one line (writing the header first when the file is new) and flushes.
void append_result(const std::filesystem::path& path, const ResultRow& row);
std::string format_result(const ResultRow& row);

}  // namespace ctxbench::bench
