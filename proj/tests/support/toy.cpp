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

#include "toy.hpp"

#include <algorithm>

namespace ctxbench::testing {

ad::Tensor random_tensor(Rng& rng, ad::Shape shape, double scale) {
  ad::Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(-scale, scale);
  return t;
}

model::ModelConfig Toy::config(const std::string& technique) const {
  return bench::model_config(*prepared, *context, bench::resolve_technique(technique, settings.fusion), settings);
}

std::vector<const ad::Tensor*> Toy::graphs() const {
  std::vector<const ad::Tensor*> out;
  for (const auto& g : prepared->graphs()) out.push_back(&g.propagation);
  return out;
}

model::Batch Toy::batch(std::size_t samples, bool with_context) const {
  const auto& targets = prepared->train_targets();
  const std::span<const std::size_t> chosen(targets.data(), std::min(samples, targets.size()));
  return model::make_batch(prepared->normalized_flow(), with_context ? context.get() : nullptr, prepared->window(),
                           chosen);
}

Toy make_toy(std::size_t locations, int interval_minutes, const std::string& features, std::uint64_t seed,
             std::size_t hidden) {
  data::SynthConfig synth;
  synth.holiday_days = {2, 9, 30, 34};
  const std::size_t slots = static_cast<std::size_t>(1440 / interval_minutes);
  data::Dataset ds = data::synth_generate(locations, 40 * slots, interval_minutes, synth, seed);
  Toy toy;
  toy.settings.backbone.hidden = hidden;
  toy.settings.backbone.embedding = hidden;
  // Dense synthetic sites: a wide radius keeps the distance graph non-trivial.
  toy.settings.graphs.distance_threshold_m = 5000.0;
  toy.prepared = std::make_unique<bench::PreparedDataset>(std::move(ds), toy.settings);
  toy.context = toy.prepared->context(enc::FeatureSet::parse(features));
  return toy;
}

}  // namespace ctxbench::testing
