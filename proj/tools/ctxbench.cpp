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

// Command-line front end: dataset ingestion and generation, grid runs, reports.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ctxbench/bench/config.hpp"
#include "ctxbench/bench/grid.hpp"
#include "ctxbench/bench/report.hpp"
#include "ctxbench/bench/results.hpp"
#include "ctxbench/core/memory.hpp"
#include "ctxbench/data/csv.hpp"
#include "ctxbench/data/ingest.hpp"
#include "ctxbench/data/synth.hpp"
#include "ctxbench/data/time.hpp"

namespace fs = std::filesystem;
using namespace ctxbench;

namespace {

data::TimePoint parse_time_option(const std::string& text, const char* flag) {
  const auto t = data::parse_timestamp(text);
  if (!t) throw CLI::ValidationError(flag, "not an ISO-8601 timestamp: " + text);
  return *t;
}

struct IngestArgs {
  fs::path trips, locations, weather, holidays, pois, out;
  int interval = 30;
  std::string start, end;
};

int run_ingest(const IngestArgs& a) {
  const auto records = data::read_trips(a.trips);
  const auto locations = data::read_locations(a.locations);
  if (records.empty() && (a.start.empty() || a.end.empty()))
    throw data::DataError(a.trips.string() + ": no trips; pass --start and --end");

  const auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                            [](const auto& x, const auto& y) { return x.time < y.time; });
  const data::TimePoint start = a.start.empty() ? data::TimePoint{data::date_of(lo->time)} : parse_time_option(a.start, "--start");
  // Default end: midnight after the last trip.
  const data::TimePoint end =
      a.end.empty() ? data::TimePoint{data::date_of(hi->time) + std::chrono::days(1)} : parse_time_option(a.end, "--end");
  if (end <= start) throw CLI::ValidationError("--end", "must be after --start");
  const auto span = std::chrono::duration_cast<std::chrono::minutes>(end - start).count();
  const auto steps = static_cast<std::size_t>(span / a.interval);

  const auto agg = data::aggregate_trips(records, locations, a.interval, start, steps);
  data::Dataset ds;
  ds.flow = agg.series;
  ds.locations = locations;
  if (!a.weather.empty()) ds.context.weather = data::read_weather(a.weather);
  if (!a.holidays.empty()) ds.context.holidays = data::read_holidays(a.holidays);
  if (!a.pois.empty()) ds.context.pois = data::read_pois(a.pois);
  data::write_dataset(a.out, ds);
  std::printf("%zu trips binned into %zu x %zu intervals of %d min (%zu outside the span dropped) -> %s\n",
              agg.accepted, steps, locations.ids.size(), a.interval, agg.dropped_out_of_span, a.out.c_str());
  return 0;
}

struct SynthArgs {
  bench::SyntheticSource source;
  int interval = 60;
  fs::path out;
};

int run_synth(const SynthArgs& a) {
  const std::size_t steps = a.source.days * static_cast<std::size_t>(1440 / a.interval);
  const auto ds = data::synth_generate(a.source.locations, steps, a.interval, a.source.effects, a.source.seed);
  data::write_dataset(a.out, ds);
  std::printf("%zu locations x %zu intervals of %d min -> %s\n", a.source.locations, steps, a.interval, a.out.c_str());
  return 0;
}

struct RunArgs {
  fs::path config;
  std::string out, preset;
  std::vector<std::uint64_t> seeds;
  std::size_t workers = 0;
};

int run_run(const RunArgs& a) {
  auto cfg = bench::parse_config(a.config);
  if (!a.preset.empty()) bench::apply_preset(cfg, a.preset);
  if (!a.seeds.empty()) cfg.seeds = a.seeds;
  if (!a.out.empty()) cfg.out_dir = a.out;
  if (a.workers > 0) cfg.workers = a.workers;

  const auto cells = bench::expand_grid(cfg);
  std::printf("%s @ %d min: %zu cells -> %s\n", cfg.dataset_name.c_str(), cfg.interval_minutes, cells.size(),
              bench::output_dir(cfg).c_str());
  const auto summary = bench::run_grid(cfg, [](const bench::GridCell& c, const std::string& outcome) {
    std::printf("  %-28s %-22s seed %-4llu %s\n", c.technique.c_str(), c.features.c_str(),
                static_cast<unsigned long long>(c.seed), outcome.c_str());
    std::fflush(stdout);
  });
  std::printf("completed %zu, skipped %zu, failed %zu\n", summary.completed, summary.skipped, summary.failed);
  if (summary.failed > 0) std::printf("see %s\n", summary.failures.c_str());
  return summary.failed > 0 ? 1 : 0;
}

std::vector<bench::ResultRow> read_all(const std::vector<fs::path>& files) {
  std::vector<bench::ResultRow> rows;
  for (const auto& f : files) {
    const fs::path p = fs::is_directory(f) ? f / "results.csv" : f;
    if (!fs::exists(p)) throw data::DataError(p.string() + ": no such results file");
    auto part = bench::read_results(p);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

void emit(const std::string& text, const fs::path& output) {
  if (output.empty()) std::cout << text;
  else data::write_text_file(output, text);
}

}  // namespace

int main(int argc, char** argv) {
  retain_freed_memory();
  CLI::App app{"Context-aware crowd flow prediction benchmark"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ing = app.add_subcommand("ingest", "Bin trip records into a flow matrix and assemble a dataset directory");
  ing->add_option("--trips", ingest.trips, "location_id,timestamp records")->required()->check(CLI::ExistingFile);
  ing->add_option("--locations", ingest.locations, "location_id,lat,lon")->required()->check(CLI::ExistingFile);
  ing->add_option("--weather", ingest.weather, "hourly weather table")->check(CLI::ExistingFile);
  ing->add_option("--holidays", ingest.holidays, "date,is_holiday")->check(CLI::ExistingFile);
  ing->add_option("--pois", ingest.pois, "location_id,category,count")->check(CLI::ExistingFile);
  ing->add_option("--interval", ingest.interval, "bin width in minutes")->check(CLI::IsMember({30, 60, 120}));
  ing->add_option("--start", ingest.start, "first bin start (default: midnight before the first trip)");
  ing->add_option("--end", ingest.end, "end of the last bin, exclusive (default: midnight after the last trip)");
  ing->add_option("--out", ingest.out, "output dataset directory")->required();

  SynthArgs synth;
  auto* syn = app.add_subcommand("synth", "Generate a synthetic dataset directory");
  syn->add_option("--locations", synth.source.locations)->capture_default_str();
  syn->add_option("--days", synth.source.days)->capture_default_str();
  syn->add_option("--seed", synth.source.seed)->capture_default_str();
  syn->add_option("--interval", synth.interval)->check(CLI::IsMember({30, 60, 120}))->capture_default_str();
  syn->add_option("--diurnal", synth.source.effects.diurnal, "diurnal amplitude");
  syn->add_option("--weekend", synth.source.effects.weekend, "weekend effect");
  syn->add_option("--holiday", synth.source.effects.holiday, "holiday effect");
  syn->add_option("--weather", synth.source.effects.weather, "weather effect");
  syn->add_option("--noise", synth.source.effects.noise, "noise standard deviation");
  syn->add_option("--holiday-rate", synth.source.effects.holiday_rate, "daily holiday probability");
  syn->add_option("--out", synth.out, "output dataset directory")->required();

  RunArgs run;
  auto* rn = app.add_subcommand("run", "Run (or resume) the experiment grid of a config file");
  rn->add_option("--config", run.config, "experiment config")->required()->check(CLI::ExistingFile);
  rn->add_option("--out", run.out, "output directory (CTXBENCH_OUT takes precedence)");
  rn->add_option("--seed", run.seeds, "seeds, replacing grid.seeds");
  rn->add_option("--preset", run.preset, "guideline: Raw-Gating with Holi-TP next to NoContext")
      ->check(CLI::IsMember({"guideline"}));
  rn->add_option("--workers", run.workers, "worker threads, replacing run.workers");

  std::vector<fs::path> report_inputs, overhead_inputs;
  fs::path report_output;
  bool sweep = false;
  auto* rep = app.add_subcommand("report", "Markdown tables of seed-mean RMSE/MAE with avgNRMSE and avgNMAE");
  rep->add_option("results", report_inputs, "results.csv files or output directories")->required();
  rep->add_option("-o,--output", report_output, "write to a file instead of stdout");
  rep->add_flag("--sweep", sweep, "append the context width sweep tables");

  auto* ovh = app.add_subcommand("overhead", "Training time of each technique relative to NoContext");
  ovh->add_option("results", overhead_inputs, "results.csv files or output directories")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ing) return run_ingest(ingest);
    if (*syn) return run_synth(synth);
    if (*rn) return run_run(run);
    if (*rep) {
      const auto rows = read_all(report_inputs);
      const auto report = bench::emit_report(rows);
      for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      emit(report.markdown + (sweep ? bench::emit_sweep_table(rows) : std::string()), report_output);
      return 0;
    }
    if (*ovh) {
      std::cout << bench::format_overhead(bench::measure_overhead(read_all(overhead_inputs)));
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
