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

#include "ctxbench/bench/grid.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <thread>


namespace ctxbench::bench {

std::vector<GridCell> expand_grid(const ExperimentConfig& config) {
  std::vector<GridCell> cells;
  std::set<std::string> seen;
  for (const auto& technique : config.techniques) {
    const model::FusionSpec spec = model::FusionSpec::parse(technique);
    for (const auto& features : config.features) {
      const std::string label = spec.uses_context() ? enc::FeatureSet::parse(features).label() : "None";
      for (std::uint64_t seed : config.seeds) {
        GridCell cell{spec.label(), label, seed};
        if (seen.insert(cell.technique + "|" + cell.features + "|" + std::to_string(seed)).second) {
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

std::filesystem::path output_dir(const ExperimentConfig& config) {
  if (const char* env = std::getenv("CTXBENCH_OUT"); env && *env) return env;
  return config.out_dir;
}

namespace {

struct Outcome {
  GridCell cell;
  std::optional<ResultRow> row;
  std::string error;
};

}  // namespace

GridSummary run_grid(const ExperimentConfig& config, const ProgressFn& progress) {
  GridSummary summary;
  const std::filesystem::path dir = output_dir(config);
  std::filesystem::create_directories(dir);
  summary.results = dir / "results.csv";
  summary.failures = dir / "failures.log";

  std::set<std::string> done;
  for (const ResultRow& r : read_results(summary.results)) done.insert(r.key());

  std::vector<GridCell> todo;
  for (GridCell& cell : expand_grid(config)) {
    ++summary.planned;
    ResultRow probe{config.dataset_name, config.interval_minutes, cell.technique, cell.features, cell.seed};
    if (done.count(probe.key())) {
      ++summary.skipped;
      if (progress) progress(cell, "skipped (already in results)");
    } else {
      todo.push_back(std::move(cell));
    }
  }
  if (todo.empty()) return summary;

  const PreparedDataset prepared(load_experiment_dataset(config), config.settings);

  std::mutex mutex;
  std::condition_variable ready;
  std::deque<Outcome> finished;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      Outcome out{todo[i], std::nullopt, {}};
      try {
        const CellResult r = run_cell(prepared, {out.cell.technique, out.cell.features, out.cell.seed}, config.settings);
        out.row = ResultRow{config.dataset_name, config.interval_minutes, out.cell.technique, out.cell.features,
                            out.cell.seed,       r.rmse,                  r.mae,              r.train_seconds,
                            r.epochs_run};
      } catch (const std::exception& e) {
        out.error = e.what();
      }
      std::lock_guard<std::mutex> lock(mutex);
      finished.push_back(std::move(out));
      ready.notify_one();
    }
  };

  const std::size_t n_workers = std::max<std::size_t>(1, std::min(config.workers, todo.size()));
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);

  for (std::size_t received = 0; received < todo.size(); ++received) {
    Outcome out;
    {
      std::unique_lock<std::mutex> lock(mutex);
      ready.wait(lock, [&] { return !finished.empty(); });
      out = std::move(finished.front());
      finished.pop_front();
    }
    if (out.row) {
      append_result(summary.results, *out.row);
      ++summary.completed;
      if (progress) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "rmse %.4f  mae %.4f  %.1fs", out.row->rmse, out.row->mae, out.row->train_seconds);
        progress(out.cell, buf);
      }
    } else {
      std::ofstream log(summary.failures, std::ios::app);
      log << config.dataset_name << ',' << config.interval_minutes << ',' << out.cell.technique << ','
          << out.cell.features << ',' << out.cell.seed << ": " << out.error << '\n';
      ++summary.failed;
      if (progress) progress(out.cell, "failed: " + out.error);
    }
  }
  return summary;
}

}  // namespace ctxbench::bench
