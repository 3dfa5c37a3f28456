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

#include <cstddef>
#include <span>
#include <string>

#include "ctxbench/autodiff/tensor.hpp"
#include "ctxbench/data/types.hpp"

namespace ctxbench::graph {

enum class GraphKind { distance, correlation };

struct SpatialGraph {
  GraphKind kind = GraphKind::distance;
  double threshold = 0.0;
  ad::Tensor adjacency;    // N x N symmetric, zero diagonal
  ad::Tensor propagation;  // D^-1/2 (A + I) D^-1/2

  std::size_t size() const { return adjacency.dim(0); }
  std::size_t edge_count() const;  // undirected edges
};

// Great-circle distance in metres on a sphere of radius 6371008.8 m.
double haversine_m(double lat1, double lon1, double lat2, double lon2);
// Plain Euclidean distance for projected coordinates already in metres.
double planar_m(double x1, double y1, double x2, double y2);

enum class DistanceMetric { haversine, planar };

SpatialGraph build_distance_graph(const data::LocationSet& locations, double threshold_m,
                                  DistanceMetric metric = DistanceMetric::haversine);

// Sample Pearson correlation; a constant input yields 0.
double pearson(std::span<const double> x, std::span<const double> y);

// flow: T x N training rows. Links i != j when pearson(col i, col j) > threshold.
SpatialGraph build_correlation_graph(const ad::Tensor& flow, double threshold);

ad::Tensor normalize_adjacency(const ad::Tensor& adjacency);

}  // namespace ctxbench::graph
