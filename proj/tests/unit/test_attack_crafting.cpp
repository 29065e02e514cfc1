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

namespace hpr {
namespace {

AttackConfig small_config(std::size_t neurons = 16, std::size_t classes = 10) {
  AttackConfig cfg;
  cfg.neurons = neurons;
  cfg.classes = classes;
  cfg.feature_bounds = FeatureBounds::uniform(8, -1.0, 1.0);
  return cfg;
}

TEST(Crafting, AttackRowsAndClassColumnsAreCopies) {
  const ModelParams p = craft_malicious_params(8, small_config());
  ASSERT_EQ(p.layers.size(), 2u);
  const DenseVector w = attack_direction(p);
  for (std::size_t i = 0; i < 16; ++i) {
    for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(p.layers[0].weights(i, k), w[k]);
  }
  const DenseVector v = class_column(p);
  for (std::size_t c = 0; c < 16; ++c) {
    for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(p.layers[1].weights(k, c), v[k]);
  }
  for (double b : p.layers[1].biases) EXPECT_EQ(b, kClassifierBias);
  EXPECT_NO_THROW(p.validate());
}

TEST(Crafting, StandardDrawHasRequestedSpread) {
  const ModelParams p = craft_malicious_params(20000, small_config(1));
  const DenseVector w = attack_direction(p);
  double sq = 0.0;
  for (double x : w) sq += x * x;
  EXPECT_NEAR(std::sqrt(sq / 20000.0), 0.1, 0.005);
}

TEST(Crafting, SameSeedSameModel) {
  AttackConfig cfg = small_config();
  cfg.rng_seed = 42;
  EXPECT_EQ(craft_malicious_params(8, cfg), craft_malicious_params(8, cfg));
  AttackConfig other = cfg;
  other.rng_seed = 43;
  EXPECT_NE(attack_direction(craft_malicious_params(8, cfg)),
            attack_direction(craft_malicious_params(8, other)));
}

TEST(Crafting, ClassValuesPairwiseDistinct) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    AttackConfig cfg = small_config(4, 10);
    cfg.rng_seed = seed;
    const DenseVector v = class_column(craft_malicious_params(8, cfg));
    double mean = 0.0;
    for (double x : v) mean += x / 10.0;
    for (std::size_t a = 0; a < 10; ++a) {
      EXPECT_GT(std::abs(v[a] - mean), 1e-8);
      for (std::size_t b = a + 1; b < 10; ++b) EXPECT_GT(std::abs(v[a] - v[b]), 1e-8);
    }
  }
}

TEST(Crafting, LocalStepsRobustLayout) {
  AttackConfig cfg = small_config(4, 10);
  cfg.weight_mode = WeightMode::local_steps_robust;
  const ModelParams p = craft_malicious_params(8, cfg);
  const DenseVector w = attack_direction(p);
  for (std::size_t k = 0; k < 8; ++k) {
    if (k % 2 == 0) {
      EXPECT_GE(w[k], 1.0);
      EXPECT_LT(w[k], 2.0);
    } else {
      EXPECT_GE(w[k], -2.0);
      EXPECT_LT(w[k], -1.0);
    }
  }
  const DenseVector v = class_column(p);
  for (std::size_t c = 0; c < 5; ++c) EXPECT_NEAR(v[c], 1e5, 0.1);
  for (std::size_t c = 5; c < 10; ++c) EXPECT_NEAR(v[c], 1e5 - 1e-2, 0.1);
}

TEST(Crafting, NoiseRobustSplitsClassesWidely) {
  AttackConfig cfg = small_config(4, 10);
  cfg.weight_mode = WeightMode::noise_robust;
  const DenseVector v = class_column(craft_malicious_params(8, cfg));
  for (std::size_t c = 0; c < 5; ++c) EXPECT_NEAR(v[c], 1e5, 0.1);
  for (std::size_t c = 5; c < 10; ++c) EXPECT_NEAR(v[c], 1e5 - 1e3, 0.1);
}

TEST(Crafting, HiddenLayersShareColumnsAndScale) {
  AttackConfig cfg = small_config(12, 4);
  cfg.hidden_layers = 2;
  cfg.hidden_width = 7;
  const ModelParams p = craft_malicious_params(8, cfg);
  ASSERT_EQ(p.layers.size(), 4u);
  EXPECT_NO_THROW(p.validate());
  double expected = 1.0;
  for (std::size_t l = 1; l <= 2; ++l) {
    const auto& w = p.layers[l].weights;
    double pos = 0.0;
    for (std::size_t m = 0; m < w.rows(); ++m) {
      for (std::size_t c = 1; c < w.cols(); ++c) EXPECT_EQ(w(m, c), w(m, 0));
      pos += std::max(w(m, 0), 0.0);
    }
    expected *= pos;
  }
  EXPECT_DOUBLE_EQ(hidden_gradient_scale(p), expected);
  EXPECT_EQ(hidden_gradient_scale(craft_malicious_params(8, small_config())), 1.0);
}

TEST(Crafting, SetAttackBiases) {
  ModelParams p = craft_malicious_params(8, small_config(3));
  set_attack_biases(p, DenseVector{1.0, 2.0, 3.0});
  EXPECT_EQ(p.layers[0].biases, (DenseVector{1.0, 2.0, 3.0}));
  EXPECT_THROW(set_attack_biases(p, DenseVector{1.0}), InvalidInput);
}

TEST(AttackConfig, RejectsBadValues) {
  AttackConfig cfg = small_config();
  cfg.neurons = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.classes = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.epsilon = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.feature_bounds = FeatureBounds{{1.0}, {0.0}};
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW(craft_malicious_params(0, small_config()), InvalidInput);
}

TEST(WeightMode, NamesRoundTrip) {
  for (auto m : {WeightMode::standard, WeightMode::local_steps_robust, WeightMode::noise_robust}) {
    EXPECT_EQ(parse_weight_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_weight_mode("nope"), ConfigError);
  AttackConfig cfg;
  EXPECT_EQ(comparison_for(cfg).mode, EqualityMode::exact);
  cfg.weight_mode = WeightMode::noise_robust;
  EXPECT_EQ(comparison_for(cfg).mode, EqualityMode::projection);
}

}  // namespace
}  // namespace hpr
