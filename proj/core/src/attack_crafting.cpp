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

#include <algorithm>
#include <cmath>
#include <string>

#include "hpr/attack.hpp"
#include "hpr/error.hpp"

namespace hpr {

WeightMode parse_weight_mode(const std::string& name) {
  if (name == "standard") return WeightMode::standard;
  if (name == "local_steps_robust") return WeightMode::local_steps_robust;
  if (name == "noise_robust") return WeightMode::noise_robust;
  throw ConfigError("unknown weight mode '" + name + "'");
}

std::string to_string(WeightMode mode) {
  switch (mode) {
    case WeightMode::standard:
      return "standard";
    case WeightMode::local_steps_robust:
      return "local_steps_robust";
    case WeightMode::noise_robust:
      return "noise_robust";
  }
  return "standard";
}

void AttackConfig::validate() const {
  if (neurons == 0) throw ConfigError("attack: neurons must be >= 1");
  if (rounds == 0) throw ConfigError("attack: rounds must be >= 1");
  if (classes < 2) throw ConfigError("attack: need at least two classes");
  if (!(epsilon >= 0.0)) throw ConfigError("attack: epsilon must be >= 0");
  if (!(g_equal_tol >= 0.0) || !(residual_tol >= 0.0)) {
    throw ConfigError("attack: tolerances must be >= 0");
  }
  if (!std::isfinite(classifier_bias)) throw ConfigError("attack: classifier bias not finite");
  if (hidden_layers > 0 && hidden_width == 0) throw ConfigError("attack: hidden width is 0");
  try {
    feature_bounds.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("attack: ") + e.what());
  }
}

StripComparison comparison_for(const AttackConfig& cfg) {
  StripComparison cmp;
  cmp.mode = cfg.weight_mode == WeightMode::standard ? EqualityMode::exact
                                                     : EqualityMode::projection;
  cmp.g_equal_tol = cfg.g_equal_tol;
  cmp.residual_tol = cfg.residual_tol;
  return cmp;
}

namespace {

constexpr double kVarianceW = 1e-2;
constexpr double kVarianceV = 1e-2;
constexpr double kVarianceJitter = 1e-4;
constexpr double kVarianceHidden = 1e-6;
constexpr double kHiddenBiasScale = 1e-3;
constexpr double kRedrawGuard = 1e-8;

double mean_of(const DenseVector& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

bool v_separated(const DenseVector& v) {
  const double m = mean_of(v);
  for (std::size_t a = 0; a < v.size(); ++a) {
    if (std::abs(v[a] - m) < kRedrawGuard) return false;
    for (std::size_t b = a + 1; b < v.size(); ++b) {
      if (std::abs(v[a] - v[b]) < kRedrawGuard) return false;
    }
  }
  return true;
}

DenseVector draw_class_column(SeededRng& rng, std::size_t classes, WeightMode mode) {
  const std::size_t half = classes / 2;
  for (;;) {
    DenseVector v(classes);
    switch (mode) {
      case WeightMode::standard:
        v = gaussian_sample(rng, classes, 0.0, std::sqrt(kVarianceV));
        break;
      case WeightMode::local_steps_robust:
      case WeightMode::noise_robust: {
        const double gap = mode == WeightMode::local_steps_robust ? 1e-2 : 1e3;
        for (std::size_t c = 0; c < classes; ++c) {
          v[c] = (c < half ? 1e5 : 1e5 - gap) + rng.normal(0.0, std::sqrt(kVarianceJitter));
        }
        break;
      }
    }
    if (v_separated(v)) return v;
  }
}

}  // namespace

ModelParams craft_malicious_params(std::size_t d, const AttackConfig& cfg) {
  if (d == 0) throw InvalidInput("craft_malicious_params: d must be >= 1");
  cfg.validate();
  SeededRng rng(cfg.rng_seed);
  const std::size_t n_neurons = cfg.neurons;

  DenseVector w(d);
  if (cfg.weight_mode == WeightMode::local_steps_robust) {
    for (std::size_t k = 0; k < d; ++k) {
      w[k] = k % 2 == 0 ? rng.uniform(1.0, 2.0) : rng.uniform(-2.0, -1.0);
    }
  } else {
    w = gaussian_sample(rng, d, 0.0, std::sqrt(kVarianceW));
  }

  ModelParams params;
  params.class_count = cfg.classes;
  Layer attack{DenseMatrix(n_neurons, d), DenseVector(n_neurons)};
  for (std::size_t i = 0; i < n_neurons; ++i) attack.weights.set_row(i, w.span());
  params.layers.push_back(std::move(attack));

  std::size_t width = n_neurons;
  for (std::size_t l = 0; l < cfg.hidden_layers; ++l) {
    const DenseVector u = gaussian_sample(rng, cfg.hidden_width, 0.0, std::sqrt(kVarianceHidden));
    Layer hidden{DenseMatrix(cfg.hidden_width, width), DenseVector(cfg.hidden_width)};
    for (std::size_t c = 0; c < width; ++c) hidden.weights.set_col(c, u.span());
    // Default fan-in init U(-1/sqrt(fan_in), 1/sqrt(fan_in)), scaled down.
    const double bound = kHiddenBiasScale / std::sqrt(static_cast<double>(width));
    for (std::size_t m = 0; m < cfg.hidden_width; ++m) {
      hidden.biases[m] = rng.uniform(-bound, bound);
    }
    params.layers.push_back(std::move(hidden));
    width = cfg.hidden_width;
  }

  const DenseVector v = draw_class_column(rng, cfg.classes, cfg.weight_mode);
  Layer classifier{DenseMatrix(cfg.classes, width), DenseVector(cfg.classes, cfg.classifier_bias)};
  for (std::size_t c = 0; c < width; ++c) classifier.weights.set_col(c, v.span());
  params.layers.push_back(std::move(classifier));
  return params;
}

DenseVector attack_direction(const ModelParams& params) {
  const auto row = params.layers.front().weights.row(0);
  return DenseVector(std::vector<double>(row.begin(), row.end()));
}

DenseVector class_column(const ModelParams& params) {
  const auto& w = params.layers.back().weights;
  DenseVector v(w.rows());
  for (std::size_t k = 0; k < w.rows(); ++k) v[k] = w(k, 0);
  return v;
}

double hidden_gradient_scale(const ModelParams& params) {
  double scale = 1.0;
  for (std::size_t l = 1; l + 1 < params.layers.size(); ++l) {
    const auto& w = params.layers[l].weights;
    double active = 0.0;
    for (std::size_t m = 0; m < w.rows(); ++m) {
      if (w(m, 0) > 0.0) active += w(m, 0);
    }
    scale *= active;
  }
  return scale;
}

void set_attack_biases(ModelParams& params, const DenseVector& biases) {
  auto& b = params.layers.front().biases;
  if (biases.size() != b.size()) throw InvalidInput("set_attack_biases: length mismatch");
  b = biases;
}

}  // namespace hpr
