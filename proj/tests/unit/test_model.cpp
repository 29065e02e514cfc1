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

#include "hpr/error.hpp"
#include "hpr/model.hpp"
#include "test_support.hpp"

namespace hpr {
namespace {

using testing::random_batch;
using testing::random_params;
using testing::single;

// Independent layer-by-layer recomputation.
DenseVector naive_logits(const ModelParams& p, const DenseVector& x) {
  std::vector<double> a(x.begin(), x.end());
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const auto& w = p.layers[l].weights;
    std::vector<double> z(w.rows());
    for (std::size_t r = 0; r < w.rows(); ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < w.cols(); ++c) acc += w(r, c) * a[c];
      z[r] = acc + p.layers[l].biases[r];
      if (l + 1 < p.layers.size() && z[r] < 0.0) z[r] = 0.0;
    }
    a = z;
  }
  return DenseVector(a);
}

TEST(Forward, ReluClampsNegative) {
  ModelParams p;
  p.class_count = 2;
  p.layers.push_back({DenseMatrix::identity(2), DenseVector(2)});
  p.layers.push_back({DenseMatrix::identity(2), DenseVector(2)});
  const auto pass = forward(p, DenseVector{1.0, -1.0});
  EXPECT_EQ(pass.activations[0], (DenseVector{1.0, 0.0}));
}

TEST(Forward, IdenticalColumnsGiveUniformProbs) {
  ModelParams p = random_params({4, 6, 5}, 3);
  const DenseVector v{0.3, -0.1, 0.7, 0.2, -0.5};
  for (std::size_t c = 0; c < 6; ++c) p.layers[1].weights.set_col(c, v.span());
  p.layers[1].biases = DenseVector(5, 1e25);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto x = random_batch(1, 4, 5, s).inputs[0];
    const auto pass = forward(p, x);
    for (double q : pass.probs) EXPECT_EQ(q, 0.2);
  }
}

TEST(Forward, MatchesNaiveRecomputation) {
  const ModelParams p = random_params({5, 7, 6, 3}, 11);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto x = random_batch(1, 5, 3, s).inputs[0];
    EXPECT_EQ(forward(p, x).activations.back(), naive_logits(p, x));
  }
}

TEST(Forward, DimensionMismatchThrows) {
  const ModelParams p = random_params({3, 4, 2}, 1);
  EXPECT_THROW(forward(p, DenseVector(2)), InvalidInput);
}

TEST(ModelParams, ValidateCatchesBadShapes) {
  ModelParams p = random_params({3, 4, 2}, 1);
  EXPECT_NO_THROW(p.validate());
  p.class_count = 3;
  EXPECT_THROW(p.validate(), InvalidInput);
  p.class_count = 2;
  p.layers[1].weights = DenseMatrix(2, 5);
  EXPECT_THROW(p.validate(), InvalidInput);
}

TEST(Batch, ValidateCatchesBadLabels) {
  Batch b = random_batch(3, 2, 2, 1);
  EXPECT_NO_THROW(b.validate(2));
  b.labels[1] = 7;
  EXPECT_THROW(b.validate(2), InvalidInput);
  EXPECT_THROW(Batch{}.validate(2), InvalidInput);
}

TEST(BatchGradient, SingletonIsPerSampleGradient) {
  const ModelParams p = random_params({4, 5, 3}, 2);
  const Batch b = random_batch(1, 4, 3, 9);
  const auto g = batch_gradient(p, b);
  const auto again = batch_gradient(p, single(b, 0));
  EXPECT_EQ(g.layers[0].weights, again.layers[0].weights);
  EXPECT_EQ(g.layers[1].biases, again.layers[1].biases);
}

TEST(BatchGradient, EqualsMeanOfPerSampleGradients) {
  const ModelParams p = random_params({6, 8, 5, 4}, 4);
  const Batch b = random_batch(7, 6, 4, 5);
  const auto g = batch_gradient(p, b);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    std::vector<double> w(g.layers[l].weights.data().size(), 0.0);
    std::vector<double> bias(g.layers[l].biases.size(), 0.0);
    for (std::size_t j = 0; j < b.size(); ++j) {
      const auto s = batch_gradient(p, single(b, j));
      for (std::size_t i = 0; i < w.size(); ++i) w[i] += s.layers[l].weights.data()[i] / 7.0;
      for (std::size_t i = 0; i < bias.size(); ++i) bias[i] += s.layers[l].biases[i] / 7.0;
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      EXPECT_NEAR(g.layers[l].weights.data()[i], w[i], 1e-12);
    }
    for (std::size_t i = 0; i < bias.size(); ++i) EXPECT_NEAR(g.layers[l].biases[i], bias[i], 1e-12);
  }
}

TEST(BatchGradient, LossMatchesDirectEvaluation) {
  const ModelParams p = random_params({3, 4, 3}, 6);
  const Batch b = random_batch(5, 3, 3, 6);
  EXPECT_NEAR(batch_gradient(p, b).loss, mean_loss(p, b), 1e-12);
}

TEST(BatchGradient, CentralDifferencesAgree) {
  const ModelParams p = random_params({5, 7, 3}, 21);
  const Batch b = random_batch(4, 5, 3, 22);
  const auto g = batch_gradient(p, b);
  const double h = 1e-6;
  ModelParams q = p;
  double worst = 0.0;
  auto probe = [&](double& slot, double analytic) {
    const double keep = slot;
    slot = keep + h;
    const double up = mean_loss(q, b);
    slot = keep - h;
    const double down = mean_loss(q, b);
    slot = keep;
    const double fd = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - analytic) / std::max({1.0, std::abs(fd), std::abs(analytic)}));
  };
  for (std::size_t l = 0; l < q.layers.size(); ++l) {
    auto w = q.layers[l].weights.data();
    for (std::size_t i = 0; i < w.size(); ++i) probe(w[i], g.layers[l].weights.data()[i]);
    for (std::size_t i = 0; i < q.layers[l].biases.size(); ++i) {
      probe(q.layers[l].biases[i], g.layers[l].biases[i]);
    }
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(BatchGradient, SinglePrecisionTracksDouble) {
  const ModelParams p = random_params({4, 6, 3}, 8, 0.5);
  const Batch b = random_batch(6, 4, 3, 8);
  const auto g64 = batch_gradient(p, b, Precision::f64);
  const auto g32 = batch_gradient(p, b, Precision::f32);
  const auto a = g64.layers[0].weights.data();
  const auto c = g32.layers[0].weights.data();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], c[i], 1e-5);
}

TEST(BatchGradient, SingleInputIdentity) {
  const ModelParams p = random_params({6, 9, 4}, 13);
  const Batch b = random_batch(1, 6, 4, 14);
  const auto g = batch_gradient(p, b);
  std::size_t checked = 0;
  for (std::size_t i = 0; i < 9; ++i) {
    const double db = g.layers[0].biases[i];
    if (db == 0.0) continue;
    ++checked;
    for (std::size_t c = 0; c < 6; ++c) {
      EXPECT_NEAR(g.layers[0].weights(i, c) / db, b.inputs[0][c], 1e-10);
    }
  }
  EXPECT_GT(checked, 0u);
}

TEST(PerSampleBiasGrad, InactiveNeuronIsZero) {
  ModelParams p = random_params({3, 4, 2}, 1);
  const DenseVector x{1.0, 1.0, 1.0};
  const double z = p.layers[0].weights(2, 0) + p.layers[0].weights(2, 1) + p.layers[0].weights(2, 2);
  p.layers[0].biases[2] = -z - 1.0;
  EXPECT_EQ(per_sample_bias_grad(p, x, 1, 2), 0.0);
}

TEST(PerSampleBiasGrad, UniformSoftmaxClosedForm) {
  const std::size_t d = 4;
  const std::size_t n_neurons = 6;
  ModelParams p = random_params({d, n_neurons, 3}, 5);
  const DenseVector w{0.3, -0.2, 0.5, 0.1};
  for (std::size_t i = 0; i < n_neurons; ++i) {
    p.layers[0].weights.set_row(i, w.span());
    p.layers[0].biases[i] = 10.0 + static_cast<double>(i);
  }
  const DenseVector v{0.4, -0.7, 1.3};
  for (std::size_t c = 0; c < n_neurons; ++c) p.layers[1].weights.set_col(c, v.span());
  p.layers[1].biases = DenseVector(3, 1e25);
  const double mean = (0.4 - 0.7 + 1.3) / 3.0;
  const DenseVector x{0.1, 0.2, 0.3, 0.4};
  for (std::size_t y = 0; y < 3; ++y) {
    for (std::size_t i = 0; i < n_neurons; ++i) {
      EXPECT_NEAR(per_sample_bias_grad(p, x, y, i), mean - v[y], 1e-15);
    }
  }
}

TEST(PerSampleBiasGrad, MatchesBackpropOnDeepNet) {
  const ModelParams p = random_params({5, 6, 4, 3}, 31);
  const Batch b = random_batch(5, 5, 3, 32);
  for (std::size_t j = 0; j < b.size(); ++j) {
    const auto g = batch_gradient(p, single(b, j));
    for (std::size_t i = 0; i < 6; ++i) {
      EXPECT_NEAR(per_sample_bias_grad(p, b.inputs[j], b.labels[j], i), g.layers[0].biases[i],
                  1e-12);
    }
  }
}

TEST(PerSampleBiasGrad, IdenticalHiddenColumnsEqualizeNeurons) {
  const std::size_t n_neurons = 8;
  ModelParams p = random_params({3, n_neurons, 5, 4}, 41);
  const DenseVector w{0.2, 0.4, -0.1};
  SeededRng rng(7);
  for (std::size_t i = 0; i < n_neurons; ++i) {
    p.layers[0].weights.set_row(i, w.span());
    p.layers[0].biases[i] = 2.0 + rng.uniform();
  }
  DenseVector u(5);
  for (double& x : u) x = rng.normal(0.0, 0.1);
  for (std::size_t c = 0; c < n_neurons; ++c) p.layers[1].weights.set_col(c, u.span());
  DenseVector v(4);
  for (double& x : v) x = rng.normal(0.0, 0.1);
  for (std::size_t c = 0; c < 5; ++c) p.layers[2].weights.set_col(c, v.span());
  const DenseVector x{0.5, 0.5, 0.5};
  const double ref = per_sample_bias_grad(p, x, 2, 0);
  for (std::size_t i = 1; i < n_neurons; ++i) {
    EXPECT_NEAR(per_sample_bias_grad(p, x, 2, i), ref, 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST(PerSampleBiasGrad, RejectsBadIndices) {
  const ModelParams p = random_params({3, 4, 2}, 1);
  EXPECT_THROW(per_sample_bias_grad(p, DenseVector(3), 0, 4), InvalidInput);
  EXPECT_THROW(per_sample_bias_grad(p, DenseVector(3), 2, 0), InvalidInput);
}

}  // namespace
}  // namespace hpr
