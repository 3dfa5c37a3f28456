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
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ctxbench/bench/experiment.hpp"
#include "ctxbench/data/synth.hpp"

namespace ctxbench::bench {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SyntheticSource {
  std::size_t locations = 20;
  std::size_t days = 56;
  std::uint64_t seed = 7;
  data::SynthConfig effects;
};

struct ExperimentConfig {
  std::string dataset_name;
  std::filesystem::path dataset_path;  // directory of the dataset files; empty for synthetic
  bool synthetic = false;
  SyntheticSource synth;
  int interval_minutes = 60;

  std::vector<std::string> techniques{"NoContext"};
  std::vector<std::string> features{"All"};
  std::vector<std::uint64_t> seeds{0};

  ExperimentSettings settings;
  std::filesystem::path out_dir = "results";
  std::size_t workers = 1;
};

// Named distance / correlation thresholds: bike (1000 m, 0), metro (5000 m, 0.35), ev (1000 m, 0.1).
GraphSettings graph_profile(std::string_view name);

// Sweep widths for a late technique with a learned representation:
// single embeddings and LSTM use 4, 8, 16, 32, 64; multi embeddings use 4-1-4-4 ... 32-1-32-32.
std::vector<std::string> embedding_sweep(std::string_view technique);

// "key = value" lines with dotted keys, '#' comments and comma-separated lists.
ExperimentConfig parse_config_text(std::string_view text, const std::string& source = "<config>");
ExperimentConfig parse_config(const std::filesystem::path& path);

// Replaces the grid with the recommended default: Raw-Gating with holiday and temporal
// position, plus the NoContext baseline.
void apply_preset(ExperimentConfig& config, std::string_view preset);

// Loads or generates the dataset and aggregates it to the configured interval.
data::Dataset load_experiment_dataset(const ExperimentConfig& config);

// Documented keys, for --help output and error messages.
const std::vector<std::string>& config_keys();

}  // namespace ctxbench::bench
