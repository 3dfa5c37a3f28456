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

#include "ctxbench/bench/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <sstream>

#include "ctxbench/data/csv.hpp"
#include "ctxbench/data/ingest.hpp"

namespace ctxbench::bench {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    const std::size_t comma = std::min(value.find(',', pos), value.size());
    const std::string_view item = trim(value.substr(pos, comma - pos));
    if (!item.empty()) out.emplace_back(item);
    pos = comma + 1;
  }
  return out;
}

struct Context {
  const std::string& source;
  std::size_t line;
  std::string key;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + key + ": " + msg);
  }
};

template <typename T>
T parse_number(const Context& ctx, std::string_view text) {
  T v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) ctx.fail("not a number: '" + std::string(text) + "'");
  return v;
}

double parse_real(const Context& ctx, std::string_view text) { return parse_number<double>(ctx, text); }

std::size_t parse_count(const Context& ctx, std::string_view text) { return parse_number<std::size_t>(ctx, text); }

std::size_t parse_positive(const Context& ctx, std::string_view text) {
  const std::size_t v = parse_count(ctx, text);
  if (v == 0) ctx.fail("must be positive");
  return v;
}

bool parse_bool(const Context& ctx, std::string_view text) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  ctx.fail("expected true or false, got '" + std::string(text) + "'");
}

using Setter = std::function<void(ExperimentConfig&, const Context&, std::string_view)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["dataset.name"] = [](auto& c, auto&, auto v) { c.dataset_name = v; };
    t["dataset.path"] = [](auto& c, auto&, auto v) { c.dataset_path = std::string(v); };
    t["dataset.synthetic"] = [](auto& c, auto& x, auto v) { c.synthetic = parse_bool(x, v); };
    t["dataset.interval"] = [](auto& c, auto& x, auto v) {
      c.interval_minutes = parse_number<int>(x, v);
      if (!data::valid_interval(c.interval_minutes)) x.fail("interval must be 30, 60 or 120");
    };
    t["synth.locations"] = [](auto& c, auto& x, auto v) { c.synth.locations = parse_positive(x, v); };
    t["synth.days"] = [](auto& c, auto& x, auto v) { c.synth.days = parse_positive(x, v); };
    t["synth.seed"] = [](auto& c, auto& x, auto v) { c.synth.seed = parse_number<std::uint64_t>(x, v); };
    t["synth.base_min"] = [](auto& c, auto& x, auto v) { c.synth.effects.base_min = parse_real(x, v); };
    t["synth.base_max"] = [](auto& c, auto& x, auto v) { c.synth.effects.base_max = parse_real(x, v); };
    t["synth.diurnal"] = [](auto& c, auto& x, auto v) { c.synth.effects.diurnal = parse_real(x, v); };
    t["synth.weekend"] = [](auto& c, auto& x, auto v) { c.synth.effects.weekend = parse_real(x, v); };
    t["synth.holiday"] = [](auto& c, auto& x, auto v) { c.synth.effects.holiday = parse_real(x, v); };
    t["synth.weather"] = [](auto& c, auto& x, auto v) { c.synth.effects.weather = parse_real(x, v); };
    t["synth.noise"] = [](auto& c, auto& x, auto v) { c.synth.effects.noise = parse_real(x, v); };
    t["synth.holiday_rate"] = [](auto& c, auto& x, auto v) { c.synth.effects.holiday_rate = parse_real(x, v); };
    t["synth.holiday_days"] = [](auto& c, auto& x, auto v) {
      c.synth.effects.holiday_days.clear();
      for (const auto& d : split_list(v)) c.synth.effects.holiday_days.push_back(parse_count(x, d));
    };
    t["grid.techniques"] = [](auto& c, auto& x, auto v) {
      c.techniques = split_list(v);
      for (const auto& name : c.techniques) {
        try {
          (void)model::FusionSpec::parse(name);
        } catch (const model::UnknownTechnique& e) {
          x.fail(e.what());
        }
      }
    };
    t["grid.features"] = [](auto& c, auto& x, auto v) {
      c.features = split_list(v);
      for (const auto& f : c.features) {
        try {
          (void)enc::FeatureSet::parse(f);
        } catch (const std::invalid_argument& e) {
          x.fail(e.what());
        }
      }
    };
    t["grid.seeds"] = [](auto& c, auto& x, auto v) {
      c.seeds.clear();
      for (const auto& s : split_list(v)) c.seeds.push_back(parse_number<std::uint64_t>(x, s));
    };
    t["grid.sweep"] = [](auto& c, auto& x, auto v) {
      for (const auto& base : split_list(v)) {
        try {
          for (auto& name : embedding_sweep(base)) c.techniques.push_back(std::move(name));
        } catch (const std::invalid_argument& e) {
          x.fail(e.what());
        }
      }
    };
    t["graph.profile"] = [](auto& c, auto& x, auto v) {
      try {
        const GraphSettings p = graph_profile(v);
        c.settings.graphs.distance_threshold_m = p.distance_threshold_m;
        c.settings.graphs.correlation_threshold = p.correlation_threshold;
      } catch (const std::invalid_argument& e) {
        x.fail(e.what());
      }
    };
    t["graph.distance"] = [](auto& c, auto& x, auto v) { c.settings.graphs.distance = parse_bool(x, v); };
    t["graph.correlation"] = [](auto& c, auto& x, auto v) { c.settings.graphs.correlation = parse_bool(x, v); };
    t["graph.distance_threshold"] = [](auto& c, auto& x, auto v) {
      c.settings.graphs.distance_threshold_m = parse_real(x, v);
    };
    t["graph.correlation_threshold"] = [](auto& c, auto& x, auto v) {
      c.settings.graphs.correlation_threshold = parse_real(x, v);
    };
    t["graph.metric"] = [](auto& c, auto& x, auto v) {
      if (v == "haversine") c.settings.graphs.metric = graph::DistanceMetric::haversine;
      else if (v == "planar") c.settings.graphs.metric = graph::DistanceMetric::planar;
      else x.fail("expected haversine or planar, got '" + std::string(v) + "'");
    };
    t["window.closeness"] = [](auto& c, auto& x, auto v) { c.settings.window.closeness = parse_count(x, v); };
    t["window.daily"] = [](auto& c, auto& x, auto v) { c.settings.window.daily = parse_count(x, v); };
    t["window.weekly"] = [](auto& c, auto& x, auto v) { c.settings.window.weekly = parse_count(x, v); };
    t["backbone.hidden"] = [](auto& c, auto& x, auto v) { c.settings.backbone.hidden = parse_positive(x, v); };
    t["backbone.embedding"] = [](auto& c, auto& x, auto v) { c.settings.backbone.embedding = parse_positive(x, v); };
    t["backbone.aggregation"] = [](auto& c, auto& x, auto v) {
      if (v == "mean") c.settings.backbone.aggregation = model::GraphAggregation::mean;
      else if (v == "weighted") c.settings.backbone.aggregation = model::GraphAggregation::weighted;
      else x.fail("expected mean or weighted, got '" + std::string(v) + "'");
    };
    t["fusion.embed_dim"] = [](auto& c, auto& x, auto v) { c.settings.fusion.embed_dim = parse_positive(x, v); };
    t["fusion.lstm_hidden"] = [](auto& c, auto& x, auto v) { c.settings.fusion.lstm_hidden = parse_positive(x, v); };
    t["fusion.family_dims"] = [](auto& c, auto& x, auto v) {
      const auto items = split_list(v);
      if (items.size() != 4) x.fail("expected four widths (weather, holiday, temporal position, POIs)");
      for (std::size_t i = 0; i < 4; ++i) c.settings.fusion.family_dims[i] = parse_positive(x, items[i]);
    };
    t["fusion.early_add_dim"] = [](auto& c, auto& x, auto v) { c.settings.fusion.early_add_dim = parse_count(x, v); };
    t["fusion.add_dim"] = [](auto& c, auto& x, auto v) { c.settings.fusion.add_dim = parse_count(x, v); };
    t["fusion.outer_sigmoid"] = [](auto& c, auto& x, auto v) { c.settings.fusion.outer_sigmoid = parse_bool(x, v); };
    t["encoding.poi"] = [](auto& c, auto& x, auto v) {
      if (v == "density") c.settings.encoding.poi = enc::PoiEncoding::density;
      else if (v == "tfidf") c.settings.encoding.poi = enc::PoiEncoding::tfidf;
      else x.fail("expected density or tfidf, got '" + std::string(v) + "'");
    };
    t["encoding.weather_state"] = [](auto& c, auto& x, auto v) {
      if (v == "one_hot") c.settings.encoding.weather_state = enc::StateEncoding::one_hot;
      else if (v == "good_bad") c.settings.encoding.weather_state = enc::StateEncoding::good_bad;
      else x.fail("expected one_hot or good_bad, got '" + std::string(v) + "'");
    };
    t["encoding.scale_pois"] = [](auto& c, auto& x, auto v) { c.settings.encoding.scale_pois = parse_bool(x, v); };
    t["split.train"] = [](auto& c, auto& x, auto v) { c.settings.split.train = parse_real(x, v); };
    t["split.validation"] = [](auto& c, auto& x, auto v) { c.settings.split.validation = parse_real(x, v); };
    t["split.test"] = [](auto& c, auto& x, auto v) { c.settings.split.test = parse_real(x, v); };
    t["train.max_epochs"] = [](auto& c, auto& x, auto v) { c.settings.train.max_epochs = parse_positive(x, v); };
    t["train.batch_size"] = [](auto& c, auto& x, auto v) { c.settings.train.batch_size = parse_positive(x, v); };
    t["train.patience"] = [](auto& c, auto& x, auto v) { c.settings.train.patience = parse_positive(x, v); };
    t["train.learning_rate"] = [](auto& c, auto& x, auto v) {
      c.settings.train.learning_rate = parse_real(x, v);
      if (!(c.settings.train.learning_rate > 0.0)) x.fail("must be positive");
    };
    t["run.out"] = [](auto& c, auto&, auto v) { c.out_dir = std::string(v); };
    t["run.workers"] = [](auto& c, auto& x, auto v) { c.workers = parse_positive(x, v); };
    return t;
  }();
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : setters()) out.push_back(k);
    return out;
  }();
  return keys;
}

GraphSettings graph_profile(std::string_view name) {
  GraphSettings g;
  if (name == "bike") {
    g.distance_threshold_m = 1000.0;
    g.correlation_threshold = 0.0;
  } else if (name == "metro") {
    g.distance_threshold_m = 5000.0;
    g.correlation_threshold = 0.35;
  } else if (name == "ev") {
    g.distance_threshold_m = 1000.0;
    g.correlation_threshold = 0.1;
  } else {
    throw std::invalid_argument("unknown graph profile '" + std::string(name) + "' (bike, metro, ev)");
  }
  return g;
}

std::vector<std::string> embedding_sweep(std::string_view technique) {
  const model::FusionSpec spec = model::FusionSpec::parse(technique);
  if (technique.find('@') != std::string_view::npos || spec.stage != model::Stage::late ||
      spec.representation == model::Representation::raw) {
    throw std::invalid_argument("'" + std::string(technique) +
                                "' has no learned context width to sweep (use an Emb, MultiEmb or LSTM technique)");
  }
  std::vector<std::string> out;
  const std::string base(technique);
  if (spec.representation == model::Representation::multi_embed) {
    for (int w : {4, 8, 16, 32}) {
      const std::string d = std::to_string(w);
      out.push_back(base + "@" + d + "-1-" + d + "-" + d);
    }
  } else {
    for (int w : {4, 8, 16, 32, 64}) out.push_back(base + "@" + std::to_string(w));
  }
  return out;
}

ExperimentConfig parse_config_text(std::string_view text, const std::string& source) {
  ExperimentConfig cfg;
  bool techniques_set = false;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    Context ctx{source, line_no, {}};
    if (eq == std::string_view::npos) {
      ctx.key = std::string(line);
      ctx.fail("expected 'key = value'");
    }
    ctx.key = std::string(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters().find(ctx.key);
    if (it == setters().end()) ctx.fail("unknown key");
    if (ctx.key == "grid.sweep" && !techniques_set) cfg.techniques.clear();
    if (ctx.key == "grid.techniques" || ctx.key == "grid.sweep") techniques_set = true;
    it->second(cfg, ctx, value);
  }
  if (!cfg.synthetic && cfg.dataset_path.empty()) {
    throw ConfigError(source + ": missing dataset source: set dataset.path or dataset.synthetic = true");
  }
  if (cfg.synthetic && !cfg.dataset_path.empty()) {
    throw ConfigError(source + ": dataset.path and dataset.synthetic are mutually exclusive");
  }
  if (cfg.techniques.empty()) throw ConfigError(source + ": grid.techniques: empty list");
  if (cfg.features.empty()) throw ConfigError(source + ": grid.features: empty list");
  if (cfg.seeds.empty()) throw ConfigError(source + ": grid.seeds: empty list");
  try {
    cfg.settings.split.validate();
  } catch (const std::exception& e) {
    throw ConfigError(source + ": split: " + e.what());
  }
  if (cfg.dataset_name.empty()) {
    cfg.dataset_name = cfg.synthetic ? "synthetic" : cfg.dataset_path.filename().string();
    if (cfg.dataset_name.empty()) cfg.dataset_name = cfg.dataset_path.parent_path().filename().string();
  }
  if (!cfg.dataset_path.empty() && cfg.dataset_path.is_relative() && source != "<config>") {
    cfg.dataset_path = std::filesystem::path(source).parent_path() / cfg.dataset_path;
  }
  cfg.settings.window.interval_minutes = cfg.interval_minutes;
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  return parse_config_text(data::read_text_file(path), path.string());
}

void apply_preset(ExperimentConfig& config, std::string_view preset) {
  if (preset != "guideline") throw ConfigError("unknown preset '" + std::string(preset) + "' (available: guideline)");
  config.techniques = {"NoContext", "Raw-Gating"};
  config.features = {"Holi-TP"};
}

data::Dataset load_experiment_dataset(const ExperimentConfig& config) {
  data::Dataset ds;
  if (config.synthetic) {
    const std::size_t slots = static_cast<std::size_t>(1440 / config.interval_minutes);
    ds = data::synth_generate(config.synth.locations, config.synth.days * slots, config.interval_minutes,
                              config.synth.effects, config.synth.seed);
  } else {
    ds = data::load_dataset(config.dataset_path);
    if (ds.flow.interval_minutes != config.interval_minutes) ds.flow = data::resample_flow(ds.flow, config.interval_minutes);
  }
  ds.name = config.dataset_name;
  return ds;
}

}  // namespace ctxbench::bench
