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

#include "hpr/attack.hpp"
#include "hpr/error.hpp"
#include "test_support.hpp"

namespace hpr {
namespace {

// Cumulative strips for inputs activated one at a time, in order.
std::vector<Strip> cumulative(const std::vector<DenseVector>& xs, const std::vector<double>& hs,
                              std::size_t n) {
  std::vector<Strip> out;
  const std::size_t d = xs.front().size();
  DenseVector weighted(d);
  double total = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    total += hs[j];
    for (std::size_t k = 0; k < d; ++k) weighted[k] += hs[j] * xs[j][k];
    DenseVector g(d);
    for (std::size_t k = 0; k < d; ++k) g[k] = weighted[k] / total;
    out.push_back({g, total / static_cast<double>(n), static_cast<double>(j)});
  }
  return out;
}

double mean_of(const DenseVector& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

TEST(Reconstruct, SingleInput) {
  const DenseVector x{0.5, -1.5, 2.0};
  const Strip s{x, -0.3, 1.0};
  const auto r = reconstruct_batch(std::span<const Strip>(&s, 1), 1);
  ASSERT_EQ(r.recovered_inputs.size(), 1u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(r.recovered_inputs[0][k], x[k], 1e-12);
  EXPECT_FALSE(r.recovered_labels[0].has_value());
}

TEST(Reconstruct, ThreeInputsWithLabels) {
  Batch b = testing::random_batch(3, 4, 3, 17);
  b.labels = {1, 0, 1};
  const DenseVector v{0.11, -0.07, 0.23};
  const double m = mean_of(v);
  std::vector<double> hs;
  for (auto y : b.labels) hs.push_back(m - v[y]);
  const auto strips = cumulative(b.inputs, hs, 3);
  ReconstructOptions opt;
  opt.class_column = v;
  const auto r = reconstruct_batch(strips, 3, opt);
  ASSERT_EQ(r.recovered_inputs.size(), 3u);
  EXPECT_EQ(r.collisions, 0u);
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(r.recovered_inputs[j][k], b.inputs[j][k], 1e-9);
    ASSERT_TRUE(r.recovered_labels[j].has_value());
    EXPECT_EQ(*r.recovered_labels[j], b.labels[j]);
    EXPECT_NEAR(r.per_input_bias_grad[j], hs[j], 1e-12);
  }
}

TEST(Reconstruct, MergedTransitionIsFlaggedAsCollision) {
  const std::vector<DenseVector> xs{{1.0, 0.0}, {0.0, 1.0}, {2.0, 2.0}};
  const DenseVector v{0.3, -0.2, 0.5};
  const double m = mean_of(v);
  const std::vector<double> hs{m - v[0], m - v[1], m - v[1]};
  auto strips = cumulative(xs, hs, 3);
  // Drop the middle plateau: the last transition now carries two samples.
  strips.erase(strips.begin() + 1);
  ReconstructOptions opt;
  opt.class_column = v;
  const auto r = reconstruct_batch(strips, 3, opt);
  EXPECT_EQ(r.recovered_inputs.size(), 1u);
  EXPECT_EQ(r.collisions, 1u);
}

TEST(Reconstruct, TinyJumpIsUnrecoverable) {
  const DenseVector v{0.3, -0.2, 0.5};
  std::vector<Strip> strips{{DenseVector{1.0, 1.0}, 0.1, 0.0},
                            {DenseVector{1.0, 1.0}, 0.1 + 1e-9, 1.0}};
  ReconstructOptions opt;
  opt.class_column = v;
  const auto r = reconstruct_batch(strips, 1, opt);
  EXPECT_EQ(r.unrecoverable, 1u);
  EXPECT_THROW(reconstruct_batch(strips, 0, opt), InvalidInput);
}

TEST(Reconstruct, AlphaRecursionAgreesWithTelescoping) {
  for (std::size_t n = 1; n <= 16; ++n) {
    SeededRng rng(100 + n);
    std::vector<DenseVector> xs;
    std::vector<double> hs;
    for (std::size_t j = 0; j < n; ++j) {
      xs.push_back(gaussian_sample(rng, 5, 0.0, 1.0));
      hs.push_back(rng.uniform(0.5, 1.5));
    }
    const auto strips = cumulative(xs, hs, n);
    const auto alpha = reconstruct_by_alpha_recursion(strips, n);
    const auto tele = reconstruct_batch(strips, n);
    ASSERT_EQ(alpha.size(), n);
    ASSERT_EQ(tele.recovered_inputs.size(), n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_NEAR(alpha[j][k], xs[j][k], 1e-8);
        EXPECT_NEAR(tele.recovered_inputs[j][k], xs[j][k], 1e-10);
      }
    }
  }
}

TEST(AlphaCoefficients, SumToOneAndReproduceMix) {
  for (std::size_t n = 1; n <= 16; ++n) {
    SeededRng rng(n);
    std::vector<double> h(n);
    for (double& x : h) x = rng.uniform(0.1, 2.0);
    const auto a = alpha_coefficients(h);
    double s = 0.0;
    for (double x : a) s += x;
    EXPECT_NEAR(s, 1.0, 1e-10);
    double total = 0.0;
    for (double x : h) total += x;
    for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(a[j] * total, h[j], 1e-10);
  }
  EXPECT_THROW(alpha_coefficients(std::vector<double>{1.0, -1.0}), InvalidInput);
}

TEST(InferLabel, NearestClassValue) {
  const DenseVector v{1.0, 2.0, 3.0};
  // mean 2: class values 1, 0, -1.
  EXPECT_EQ(infer_label(-1.0, v), 2u);
  EXPECT_EQ(infer_label(0.9, v), 0u);
  EXPECT_EQ(infer_label(-2.0, v, 2.0), 2u);
  EXPECT_FALSE(infer_label(0.5, v).has_value());
  EXPECT_THROW(infer_label(0.0, DenseVector{}), InvalidInput);
}

}  // namespace
}  // namespace hpr
