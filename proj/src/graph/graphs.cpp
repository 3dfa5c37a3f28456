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

#include "ctxbench/graph/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ctxbench::graph {

namespace {

constexpr double kEarthRadiusM = 6371008.8;

double radians(double deg) { return deg * M_PI / 180.0; }

SpatialGraph finish(GraphKind kind, double threshold, ad::Tensor adjacency) {
  SpatialGraph g;
  g.kind = kind;
  g.threshold = threshold;
  g.propagation = normalize_adjacency(adjacency);
  g.adjacency = std::move(adjacency);
  return g;
}

}  // namespace

std::size_t SpatialGraph::edge_count() const {
  std::size_t edges = 0;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges += adjacency.at(i, j) != 0.0;
  return edges;
}

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
  const double dlat = radians(lat2 - lat1), dlon = radians(lon2 - lon1);
  const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(radians(lat1)) * std::cos(radians(lat2)) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(a)));
}

double planar_m(double x1, double y1, double x2, double y2) { return std::hypot(x2 - x1, y2 - y1); }

SpatialGraph build_distance_graph(const data::LocationSet& locations, double threshold_m, DistanceMetric metric) {
  const std::size_t n = locations.size();
  if (n < 2) throw std::invalid_argument("distance graph needs at least 2 locations");
  if (!(threshold_m > 0.0)) throw std::invalid_argument("distance threshold must be positive");
  ad::Tensor a({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = metric == DistanceMetric::haversine
                           ? haversine_m(locations.lat[i], locations.lon[i], locations.lat[j], locations.lon[j])
                           : planar_m(locations.lat[i], locations.lon[i], locations.lat[j], locations.lon[j]);
      if (d < threshold_m) a.at(i, j) = a.at(j, i) = 1.0;
    }
  }
  return finish(GraphKind::distance, threshold_m, std::move(a));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: series lengths differ");
  if (x.size() < 2) throw std::invalid_argument("pearson: need at least 2 observations");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

SpatialGraph build_correlation_graph(const ad::Tensor& flow, double threshold) {
  if (flow.rank() != 2) throw ad::ShapeError("correlation graph expects a T x N matrix");
  const std::size_t t = flow.dim(0), n = flow.dim(1);
  std::vector<std::vector<double>> cols(n, std::vector<double>(t));
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < n; ++j) cols[j][i] = flow.at(i, j);
  ad::Tensor a({n, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (pearson(cols[i], cols[j]) > threshold) a.at(i, j) = a.at(j, i) = 1.0;
  return finish(GraphKind::correlation, threshold, std::move(a));
}

ad::Tensor normalize_adjacency(const ad::Tensor& adjacency) {
  if (adjacency.rank() != 2 || adjacency.dim(0) != adjacency.dim(1)) {
    throw ad::ShapeError("adjacency must be square, got " + ad::to_string(adjacency.shape()));
  }
  const std::size_t n = adjacency.dim(0);
  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = adjacency.at(i, j);
      if (a != adjacency.at(j, i)) throw std::invalid_argument("adjacency must be symmetric");
      if (a < 0.0) throw std::invalid_argument("adjacency must be non-negative");
      if (i != j) deg += a;
    }
    inv_sqrt_deg[i] = 1.0 / std::sqrt(deg);
  }
  ad::Tensor out({n, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double a = (i == j ? 1.0 : adjacency.at(i, j));
      out.at(i, j) = inv_sqrt_deg[i] * a * inv_sqrt_deg[j];
    }
  return out;
}

}  // namespace ctxbench::graph
