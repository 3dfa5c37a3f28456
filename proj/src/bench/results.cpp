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

#include "ctxbench/bench/results.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "ctxbench/data/csv.hpp"

namespace ctxbench::bench {

std::string ResultRow::key() const {
  return dataset + "|" + std::to_string(interval) + "|" + technique + "|" + features + "|" + std::to_string(seed);
}

std::string format_result(const ResultRow& r) {
  return r.dataset + "," + std::to_string(r.interval) + "," + r.technique + "," + r.features + "," +
         std::to_string(r.seed) + "," + data::format_double(r.rmse) + "," + data::format_double(r.mae) + "," +
         data::format_double(r.train_seconds) + "," + std::to_string(r.epochs_run);
}

std::vector<ResultRow> read_results(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return {};
  const data::CsvTable table = data::read_csv(path);
  std::string header;
  for (const auto& h : table.header) header += (header.empty() ? "" : ",") + h;
  if (header != kResultsHeader) {
    throw data::DataError(path.string() + ": unexpected header, expected '" + std::string(kResultsHeader) + "'");
  }
  std::vector<ResultRow> rows;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    ResultRow r;
    r.dataset = f[0];
    r.interval = static_cast<int>(data::parse_double(table, i, 1));
    r.technique = f[2];
    r.features = f[3];
    const auto res = std::from_chars(f[4].data(), f[4].data() + f[4].size(), r.seed);
    if (res.ec != std::errc{} || res.ptr != f[4].data() + f[4].size()) table.fail(i, "invalid seed '" + f[4] + "'");
    r.rmse = data::parse_double(table, i, 5);
    r.mae = data::parse_double(table, i, 6);
    r.train_seconds = data::parse_double(table, i, 7);
    r.epochs_run = static_cast<std::size_t>(data::parse_double(table, i, 8));
    if (!(r.rmse >= 0.0) || !(r.mae >= 0.0) || !std::isfinite(r.rmse) || !std::isfinite(r.mae)) {
      table.fail(i, "metrics must be finite and non-negative");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void append_result(const std::filesystem::path& path, const ResultRow& row) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::app);
  if (!out) throw data::DataError("cannot open " + path.string() + " for appending");
  if (fresh) out << kResultsHeader << '\n';
  out << format_result(row) << '\n';
  out.flush();
  if (!out) throw data::DataError("write to " + path.string() + " failed");
}

}  // namespace ctxbench::bench
