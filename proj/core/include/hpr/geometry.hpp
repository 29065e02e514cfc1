// Copyright 2026 The hpr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <vector>

#include "hpr/data.hpp"
#include "hpr/numerics.hpp"

namespace hpr {

struct PointCloud {
  std::vector<DenseVector> points;

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }
  /// Throws InvalidInput when empty, zero-dimensional or ragged.
  void validate() const;
};

/// True iff points[i] lies outside the convex hull of the other points,
/// decided by phase-one simplex feasibility of
///   sum_k lambda_k x_k = x_i, sum_k lambda_k = 1, lambda >= 0.
/// Duplicated points are never separable.
bool is_separable(const PointCloud& cloud, std::size_t i, double tol = 1e-9);

/// One flag per point; flags[i] == is_separable(cloud, i).
std::vector<bool> separable_points(const PointCloud& cloud, double tol = 1e-9);

std::size_t hull_vertex_count(const PointCloud& cloud, double tol = 1e-9);

/// Indices of the strict vertices of a planar cloud (collinear boundary
/// points excluded), ascending; monotone chain.
std::vector<std::size_t> planar_hull_vertices(const PointCloud& cloud);

/// Order-of-growth term for the expected number of hull vertices:
/// n^((d-1)/(d+1)) (ball), (ln n)^(d-1) (cube), (ln n)^((d-1)/2) (gauss).
double theoretical_order(Distribution dist, double n, std::size_t d);

}  // namespace hpr
