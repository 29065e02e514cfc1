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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hpr/error.hpp"
#include "hpr/geometry.hpp"

namespace hpr {
namespace {

PointCloud cloud(std::vector<DenseVector> pts) { return PointCloud{std::move(pts)}; }

TEST(Separable, TriangleAndCentroid) {
  const auto c = cloud({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0 / 3.0, 1.0 / 3.0}});
  EXPECT_TRUE(is_separable(c, 0));
  EXPECT_TRUE(is_separable(c, 1));
  EXPECT_TRUE(is_separable(c, 2));
  EXPECT_FALSE(is_separable(c, 3));
  EXPECT_EQ(hull_vertex_count(c), 3u);
}

TEST(Separable, SquareWithCenterAndEdgeMidpoint) {
  const auto c = cloud({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {0.5, 0.5}, {0.5, 0.0}});
  EXPECT_EQ(separable_points(c), (std::vector<bool>{true, true, true, true, false, false}));
}

TEST(Separable, PointsOnCircleAreAllVertices) {
  std::vector<DenseVector> pts;
  for (int k = 0; k < 100; ++k) {
    const double t = 2.0 * std::numbers::pi * k / 100.0;
    pts.push_back({std::cos(t), std::sin(t)});
  }
  EXPECT_EQ(hull_vertex_count(cloud(pts)), 100u);
}

TEST(Separable, CubeCornersIn3d) {
  std::vector<DenseVector> pts;
  for (int m = 0; m < 8; ++m) pts.push_back({double(m & 1), double((m >> 1) & 1), double(m >> 2)});
  pts.push_back({0.5, 0.5, 0.5});
  pts.push_back({0.5, 0.5, 1.0});
  EXPECT_EQ(hull_vertex_count(cloud(pts)), 8u);
}

TEST(Separable, AgreesWithPlanarHull) {
  SeededRng rng(21);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 3 + rng.below(40);
    std::vector<DenseVector> pts;
    for (std::size_t j = 0; j < n; ++j) pts.push_back({rng.normal(), rng.normal()});
    const auto c = cloud(pts);
    const auto flags = separable_points(c);
    std::vector<std::size_t> lp;
    for (std::size_t j = 0; j < n; ++j) {
      if (flags[j]) lp.push_back(j);
    }
    EXPECT_EQ(lp, planar_hull_vertices(c)) << "cloud " << t;
  }
}

TEST(Separable, DuplicatedPointsAreNotVertices) {
  const auto c = cloud({{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
  EXPECT_EQ(separable_points(c), (std::vector<bool>{false, false, true, true}));
  EXPECT_EQ(planar_hull_vertices(c), (std::vector<std::size_t>{2, 3}));
  EXPECT_TRUE(is_separable(cloud({{4.0, 2.0}}), 0));
}

TEST(Separable, VertexFractionShrinksWithN) {
  double prev = 1.1;
  for (std::size_t n : {32u, 128u, 512u}) {
    const auto data = gen_synthetic(Distribution::ball, n, 3, 2, 5);
    const double frac =
        static_cast<double>(hull_vertex_count(cloud(data.batch.inputs))) / static_cast<double>(n);
    EXPECT_LT(frac, prev);
    prev = frac;
  }
}

TEST(Separable, RejectsBadInput) {
  EXPECT_THROW(is_separable(cloud({}), 0), InvalidInput);
  EXPECT_THROW(is_separable(cloud({{1.0}, {1.0, 2.0}}), 0), InvalidInput);
  EXPECT_THROW(is_separable(cloud({{1.0}}), 1), InvalidInput);
  EXPECT_THROW(planar_hull_vertices(cloud({{1.0, 2.0, 3.0}})), InvalidInput);
}

TEST(TheoreticalOrder, KnownValues) {
  EXPECT_NEAR(theoretical_order(Distribution::ball, 1000.0, 3), std::pow(1000.0, 0.5), 1e-9);
  EXPECT_NEAR(theoretical_order(Distribution::cube, std::exp(2.0), 4), 8.0, 1e-9);
  EXPECT_NEAR(theoretical_order(Distribution::gauss, std::exp(4.0), 3), 4.0, 1e-9);
  EXPECT_THROW(theoretical_order(Distribution::ball, 1.0, 3), InvalidInput);
}

}  // namespace
}  // namespace hpr
