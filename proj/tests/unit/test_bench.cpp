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

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "ctxbench/bench/config.hpp"
#include "ctxbench/bench/grid.hpp"
#include "ctxbench/bench/report.hpp"
#include "ctxbench/bench/results.hpp"
#include "ctxbench/data/csv.hpp"
#include "support/fixtures.hpp"

using namespace ctxbench;
using namespace ctxbench::bench;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("ctxbench_test_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text, "t.conf");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

// Small enough to train a cell in well under a second.
const char* kTinyGrid = R"(
dataset.synthetic = true
synth.locations = 3
synth.days = 14
synth.diurnal = 1
window.weekly = 0
backbone.hidden = 4
backbone.embedding = 4
fusion.embed_dim = 4
train.max_epochs = 2
)";

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

ResultRow row(std::string ds, std::string technique, std::string features, double rmse, double mae,
              std::uint64_t seed = 0, double seconds = 1.0) {
  return {std::move(ds), 60, std::move(technique), std::move(features), seed, rmse, mae, seconds, 1};
}

}  // namespace

TEST_CASE("config defaults and parsing") {
  const auto cfg = parse_config_text("dataset.synthetic = true\n");
  CHECK(cfg.synthetic);
  CHECK(cfg.dataset_name == "synthetic");
  CHECK(cfg.interval_minutes == 60);
  CHECK(cfg.techniques == std::vector<std::string>{"NoContext"});
  CHECK(cfg.features == std::vector<std::string>{"All"});
  CHECK(cfg.seeds == std::vector<std::uint64_t>{0});
  CHECK(cfg.synth.locations == 20);
  CHECK(cfg.synth.days == 56);
  CHECK(cfg.settings.train.max_epochs == 200);
  CHECK(cfg.settings.train.batch_size == 32);
  CHECK(cfg.settings.train.patience == 10);
  CHECK(cfg.settings.train.learning_rate == 1e-3);
  CHECK(cfg.settings.backbone.hidden == 64);
  CHECK(cfg.settings.window.closeness == 6);
  CHECK(cfg.settings.window.daily == 7);
  CHECK(cfg.settings.window.weekly == 4);
  CHECK(cfg.workers == 1);

  const auto full = parse_config_text(R"(
# comment
dataset.synthetic = true
dataset.interval = 30
grid.techniques = NoContext, Raw-Gating
grid.features = Holi-TP, TP
grid.seeds = 1,2,3
train.learning_rate = 3e-3
run.workers = 2
)");
  CHECK(full.interval_minutes == 30);
  CHECK(full.settings.window.interval_minutes == 30);
  CHECK(full.techniques == std::vector<std::string>{"NoContext", "Raw-Gating"});
  CHECK(full.features == std::vector<std::string>{"Holi-TP", "TP"});
  CHECK(full.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(full.settings.train.learning_rate == 3e-3);
  CHECK(full.workers == 2);
}

TEST_CASE("config errors name the offending input") {
  const auto typo = error_of("dataset.synthetic = true\ngrid.techniques = NoContext, Raw-Gatng\n");
  CHECK(typo.find("Raw-Gatng") != std::string::npos);
  CHECK(typo.find("t.conf:2") != std::string::npos);

  const auto unknown = error_of("dataset.synthetic = true\ntrain.epochs = 3\n");
  CHECK(unknown.find("t.conf:2: train.epochs: unknown key") != std::string::npos);

  CHECK(error_of("grid.seeds = 1\n").find("missing dataset source") != std::string::npos);
  CHECK(!error_of("dataset.synthetic = true\ndataset.path = x\n").empty());
  CHECK(!error_of("dataset.synthetic = true\ndataset.interval = 45\n").empty());
  CHECK(!error_of("dataset.synthetic = true\nsplit.train = 0.95\n").empty());
  CHECK(!error_of("dataset.synthetic = true\ngrid.features = Wea-Wea\n").empty());
  CHECK(!error_of("dataset.synthetic = true\ntrain.learning_rate = fast\n").empty());
  CHECK(!error_of("dataset.synthetic = true\nno equals sign\n").empty());
}

TEST_CASE("dataset path resolves against the config file") {
  TempDir tmp;
  data::write_text_file(tmp.path / "exp.conf", "dataset.path = data/bike\n");
  const auto cfg = parse_config(tmp.path / "exp.conf");
  CHECK(cfg.dataset_path == tmp.path / "data/bike");
  CHECK(cfg.dataset_name == "bike");
}

TEST_CASE("guideline preset") {
  auto cfg = parse_config_text("dataset.synthetic = true\ngrid.techniques = LSTM-Add\ngrid.features = Wea\n");
  apply_preset(cfg, "guideline");
  CHECK(cfg.techniques == std::vector<std::string>{"NoContext", "Raw-Gating"});
  CHECK(cfg.features == std::vector<std::string>{"Holi-TP"});
  CHECK_THROWS_AS(apply_preset(cfg, "fastest"), ConfigError);
}

TEST_CASE("graph profiles") {
  const auto bike = graph_profile("bike");
  CHECK(bike.distance_threshold_m == 1000.0);
  CHECK(bike.correlation_threshold == 0.0);
  const auto metro = graph_profile("metro");
  CHECK(metro.distance_threshold_m == 5000.0);
  CHECK(metro.correlation_threshold == 0.35);
  const auto ev = graph_profile("ev");
  CHECK(ev.distance_threshold_m == 1000.0);
  CHECK(ev.correlation_threshold == 0.1);
  CHECK_THROWS(graph_profile("tram"));

  const auto cfg = parse_config_text("dataset.synthetic = true\ngraph.profile = metro\n");
  CHECK(cfg.settings.graphs.distance_threshold_m == 5000.0);
  CHECK(cfg.settings.graphs.correlation_threshold == 0.35);
}

TEST_CASE("embedding sweep") {
  CHECK(embedding_sweep("Emb-Gating") ==
        std::vector<std::string>{"Emb-Gating@4", "Emb-Gating@8", "Emb-Gating@16", "Emb-Gating@32", "Emb-Gating@64"});
  CHECK(embedding_sweep("LSTM-Add").size() == 5);
  const auto multi = embedding_sweep("MultiEmb-Concat");
  CHECK(multi.front() == "MultiEmb-Concat@4-1-4-4");
  CHECK(multi.back() == "MultiEmb-Concat@32-1-32-32");
  CHECK_THROWS(embedding_sweep("Raw-Gating"));
  CHECK_THROWS(embedding_sweep("EarlyConcat"));
  CHECK_THROWS(embedding_sweep("Emb-Add@8"));

  const auto cfg = parse_config_text("dataset.synthetic = true\ngrid.sweep = Emb-Add\n");
  CHECK(cfg.techniques.size() == 5);
  const auto both = parse_config_text("dataset.synthetic = true\ngrid.techniques = NoContext\ngrid.sweep = Emb-Add\n");
  CHECK(both.techniques.size() == 6);
}

TEST_CASE("results file round trip") {
  TempDir tmp;
  const fs::path file = tmp.path / "results.csv";
  CHECK(read_results(file).empty());
  const ResultRow a{"bike", 60, "Raw-Gating", "Holi-TP", 3, 0.1 + 0.2, 1.0 / 3.0, 2.5, 17};
  append_result(file, a);
  append_result(file, row("bike", "NoContext", "None", 1, 2));
  const auto back = read_results(file);
  REQUIRE(back.size() == 2);
  CHECK(back[0].rmse == a.rmse);
  CHECK(back[0].mae == a.mae);
  CHECK(back[0].key() == a.key());
  CHECK(back[0].epochs_run == 17);
  CHECK(line_count(file) == 3);

  data::write_text_file(file, "dataset,interval\nbike,60\n");
  CHECK_THROWS(read_results(file));
  data::write_text_file(file, std::string(kResultsHeader) + "\nbike,60,NoContext,None,x,1,1,1,1\n");
  CHECK_THROWS(read_results(file));
}

TEST_CASE("grid expansion") {
  auto cfg = parse_config_text("dataset.synthetic = true\n");
  cfg.techniques = {"NoContext", "Raw-Gating"};
  cfg.features = {"Holi", "TP", "Holi-TP"};
  cfg.seeds = {0, 1};
  const auto cells = expand_grid(cfg);
  // NoContext ignores the feature axis.
  CHECK(cells.size() == 2 + 3 * 2);
  CHECK(cells[0].features == "None");
}

TEST_CASE("grid runs, resumes and logs failures") {
  TempDir tmp;
  auto cfg = parse_config_text(kTinyGrid);
  cfg.out_dir = tmp.path / "out";
  cfg.techniques = {"Raw-Gating", "Emb-Add"};
  cfg.features = {"Holi", "TP", "Holi-TP"};
  cfg.seeds = {0, 1};
  cfg.workers = 2;

  const auto first = run_grid(cfg);
  CHECK(first.planned == 12);
  CHECK(first.completed == 12);
  CHECK(first.failed == 0);
  CHECK(read_results(first.results).size() == 12);

  const auto second = run_grid(cfg);
  CHECK(second.skipped == 12);
  CHECK(second.completed == 0);
  CHECK(read_results(first.results).size() == 12);

  SUBCASE("CTXBENCH_OUT overrides the configured directory") {
    const fs::path env_dir = tmp.path / "env";
    ::setenv("CTXBENCH_OUT", env_dir.c_str(), 1);
    CHECK(output_dir(cfg) == env_dir);
    cfg.seeds = {0};
    cfg.features = {"Holi"};
    cfg.techniques = {"NoContext"};
    const auto s = run_grid(cfg);
    ::unsetenv("CTXBENCH_OUT");
    CHECK(s.results == env_dir / "results.csv");
    CHECK(read_results(s.results).size() == 1);
    CHECK(output_dir(cfg) == cfg.out_dir);
  }

  SUBCASE("a failing cell is logged and the rest complete") {
    const fs::path data_dir = tmp.path / "nowx";
    data::write_dataset(data_dir, load_experiment_dataset(cfg));
    fs::remove(data_dir / "weather.csv");
    cfg.synthetic = false;
    cfg.dataset_path = data_dir;
    cfg.dataset_name = "nowx";
    cfg.out_dir = tmp.path / "fail";
    cfg.techniques = {"Raw-Gating"};
    cfg.features = {"Wea", "Holi"};
    cfg.seeds = {0};
    const auto s = run_grid(cfg);
    CHECK(s.completed == 1);
    CHECK(s.failed == 1);
    const auto log = data::read_text_file(s.failures);
    CHECK(log.rfind("nowx,60,Raw-Gating,Wea,0: ", 0) == 0);
    CHECK(log.find("weather") != std::string::npos);
  }
}

TEST_CASE("report tables") {
  SUBCASE("single method normalizes to one") {
    const auto tables = summarize({row("a", "NoContext", "None", 2, 1), row("b", "NoContext", "None", 5, 3)});
    REQUIRE(tables.size() == 1);
    CHECK(*tables[0].avg_rmse[0] == 1.0);
    CHECK(emit_report({row("a", "NoContext", "None", 2, 1)}).markdown.find("1.0000") != std::string::npos);
  }

  SUBCASE("dominated method, bold minima and stars") {
    const std::vector<ResultRow> rows{
        row("a", "NoContext", "None", 2.0, 1.0), row("b", "NoContext", "None", 4.0, 2.0),
        row("a", "Raw-Gating", "Holi-TP", 1.0, 0.5), row("b", "Raw-Gating", "Holi-TP", 4.0, 2.0),
        row("a", "EarlyConcat", "All", 3.0, 1.5), row("b", "EarlyConcat", "All", 8.0, 4.0)};
    const auto t = summarize(rows).at(0);
    CHECK(t.methods == std::vector<std::string>{"NoContext", "Raw-Gating (Holi-TP)", "EarlyConcat (All)"});
    CHECK(t.has_baseline);
    CHECK(*t.avg_rmse[0] == doctest::Approx(1.5));
    CHECK(*t.avg_rmse[1] == doctest::Approx(1.0));
    CHECK(*t.avg_rmse[2] == doctest::Approx(2.5));
    const auto md = emit_report(rows).markdown;
    CHECK(md.find("| Raw-Gating (Holi-TP) | **1.0000** |") != std::string::npos);
    CHECK(md.find("**1.0000***") != std::string::npos);
    CHECK(md.find("2.5000*") == std::string::npos);
  }

  SUBCASE("seeds are averaged") {
    const auto t = summarize({row("a", "NoContext", "None", 1.0, 1.0, 0), row("a", "NoContext", "None", 3.0, 2.0, 1)}).at(0);
    CHECK(*t.rmse[0][0] == 2.0);
    CHECK(*t.mae[0][0] == 1.5);
  }

  SUBCASE("missing baseline drops stars with a warning") {
    const auto r = emit_report({row("a", "Raw-Gating", "TP", 1, 1), row("a", "Emb-Add", "TP", 2, 2)});
    CHECK(r.warnings.size() == 1);
    CHECK(r.markdown.find("0* |") == std::string::npos);
    CHECK(r.markdown.find("*** |") == std::string::npos);
  }

  SUBCASE("reference technique table") {
    const auto groups = testing::load_metric_groups(testing::fixture_dir() / "techniques_stmeta_rmse.csv");
    std::vector<ResultRow> rows;
    for (const auto& g : groups) {
      for (std::size_t m = 0; m < g.methods.size(); ++m)
        for (std::size_t d = 0; d < g.datasets.size(); ++d) {
          ResultRow r = row(g.datasets[d], g.methods[m], g.methods[m] == "NoContext" ? "None" : "All", g.values[m][d],
                            g.values[m][d]);
          r.interval = std::stoi(g.label);
          rows.push_back(r);
        }
    }
    const auto tables = summarize(rows);
    REQUIRE(tables.size() == groups.size());
    for (const auto& t : tables) {
      const auto& g = *std::find_if(groups.begin(), groups.end(),
                                    [&](const auto& x) { return std::stoi(x.label) == t.interval; });
      for (std::size_t m = 0; m < g.methods.size(); ++m) {
        CAPTURE(g.methods[m]);
        CHECK(std::abs(*t.avg_rmse[m] - g.printed[m]) <= 1e-3);
      }
    }
  }
}

TEST_CASE("overhead ratios") {
  std::vector<ResultRow> rows{row("a", "NoContext", "None", 1, 1, 0, 10.0), row("a", "NoContext", "None", 1, 1, 1, 20.0),
                              row("a", "EarlyConcat", "All", 1, 1, 0, 15.0), row("a", "EarlyConcat", "All", 1, 1, 1, 20.0),
                              row("b", "Raw-Gating", "All", 1, 1, 0, 99.0)};
  const auto table = measure_overhead(rows);
  REQUIRE(table.size() == 2);
  CHECK(table[0].technique == "NoContext");
  CHECK(table[0].ratio == 1.0);
  CHECK(table[1].ratio == doctest::Approx(1.25));
  CHECK(table[1].pairs == 2);
  CHECK(format_overhead(table).find("| EarlyConcat | 2 |") != std::string::npos);
  CHECK_THROWS_AS(measure_overhead({row("a", "Raw-Gating", "All", 1, 1)}), std::invalid_argument);
}

TEST_CASE("sweep table") {
  const std::vector<ResultRow> rows{row("a", "Emb-Add@4", "All", 1.5, 1), row("a", "Emb-Add@8", "All", 1.25, 1),
                                    row("a", "Emb-Add", "All", 1.0, 1), row("a", "Raw-Gating", "All", 1.0, 1)};
  const auto md = emit_sweep_table(rows);
  CHECK(md.find("| Technique | 4 | 8 | 16 |") != std::string::npos);
  CHECK(md.find("| Emb-Add (All) | 1.5000 | 1.2500 | 1.0000 |") != std::string::npos);
  CHECK(md.find("Raw-Gating") == std::string::npos);
  CHECK(emit_sweep_table({row("a", "Emb-Add", "All", 1, 1)}).empty());
}
