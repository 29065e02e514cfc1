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
#include <limits>
#include <numeric>

#include "hpr/attack.hpp"
#include "hpr/error.hpp"

namespace hpr {

namespace {

double mean_of(const DenseVector& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::optional<std::size_t> infer_label(double h_sample, const DenseVector& v, double scale) {
  if (v.empty()) throw InvalidInput("infer_label: empty class column");
  const double m = mean_of(v);
  double best = std::numeric_limits<double>::infinity();
  double second = best;
  std::size_t arg = 0;
  for (std::size_t c = 0; c < v.size(); ++c) {
    const double dist = std::abs(h_sample - scale * (m - v[c]));
    if (dist < best) {
      second = best;
      best = dist;
      arg = c;
    } else if (dist < second) {
      second = dist;
    }
  }
  if (second - best <= 1e-8) return std::nullopt;
  return arg;
}

ReconstructionResult reconstruct_batch(std::span<const Strip> plateaus, std::size_t n,
                                       const ReconstructOptions& options) {
  if (n == 0) throw InvalidInput("reconstruct_batch: n must be >= 1");
  ReconstructionResult result;
  if (plateaus.empty()) return result;
  const std::size_t d = plateaus.front().g.size();
  const double scale_n = static_cast<double>(n);

  // Expected per-sample bias gradients, one per class.
  std::vector<double> class_values;
  double min_class = 0.0;
  double max_class = 0.0;
  if (options.class_column) {
    const double m = mean_of(*options.class_column);
    for (double vc : *options.class_column) {
      class_values.push_back(options.gradient_scale * (m - vc));
    }
    min_class = std::numeric_limits<double>::infinity();
    for (double c : class_values) {
      min_class = std::min(min_class, std::abs(c));
      max_class = std::max(max_class, std::abs(c));
    }
  }

  // Telescoping over dL/dW_i = h_k g_k: consecutive plateaus differ by one
  // input, so x = (h_{k+1} g_{k+1} - h_k g_k) / (h_{k+1} - h_k). This is the
  // alpha recursion with the sum over earlier inputs collapsed.
  double prev_h = 0.0;
  DenseVector prev_w(d);
  for (const Strip& s : plateaus) {
    if (s.g.size() != d) throw InvalidInput("reconstruct_batch: ragged strips");
    DenseVector cur_w(d);
    for (std::size_t k = 0; k < d; ++k) cur_w[k] = s.h * s.g[k];
    const double dh = s.h - prev_h;
    const double sample_grad = scale_n * dh;

    bool keep = std::abs(dh) > options.h_floor;
    if (keep && !class_values.empty()) keep = std::abs(sample_grad) >= 0.5 * min_class;
    if (!keep) {
      ++result.unrecoverable;
    } else {
      bool collided = false;
      if (!class_values.empty() && options.detect_collisions) {
        double nearest = std::numeric_limits<double>::infinity();
        for (double c : class_values) nearest = std::min(nearest, std::abs(sample_grad - c));
        collided = nearest > options.label_tol * std::max(max_class, 1e-300);
      } else if (!class_values.empty()) {
        collided = std::abs(sample_grad) > 1.5 * max_class;
      }
      if (collided) {
        ++result.collisions;
      } else {
        DenseVector x(d);
        for (std::size_t k = 0; k < d; ++k) x[k] = (cur_w[k] - prev_w[k]) / dh;
        result.recovered_inputs.push_back(std::move(x));
        result.per_input_strip_bias.push_back(s.bias);
        result.per_input_bias_grad.push_back(sample_grad);
        if (options.class_column) {
          result.recovered_labels.push_back(
              infer_label(sample_grad, *options.class_column, options.gradient_scale));
        } else {
          result.recovered_labels.push_back(std::nullopt);
        }
      }
    }
    prev_h = s.h;
    prev_w = std::move(cur_w);
  }
  return result;
}

std::vector<double> alpha_coefficients(std::span<const double> per_sample_h) {
  const double total = std::accumulate(per_sample_h.begin(), per_sample_h.end(), 0.0);
  if (total == 0.0) throw InvalidInput("alpha_coefficients: per-sample gradients sum to 0");
  std::vector<double> alpha;
  alpha.reserve(per_sample_h.size());
  for (double h : per_sample_h) alpha.push_back(h / total);
  return alpha;
}

std::vector<DenseVector> reconstruct_by_alpha_recursion(std::span<const Strip> plateaus,
                                                        std::size_t n) {
  if (n == 0) throw InvalidInput("reconstruct_by_alpha_recursion: n must be >= 1");
  std::vector<DenseVector> xs;
  std::vector<double> sample_h;
  double prev_h = 0.0;
  const double scale_n = static_cast<double>(n);
  for (const Strip& s : plateaus) {
    sample_h.push_back(scale_n * (s.h - prev_h));
    prev_h = s.h;
    const auto alpha = alpha_coefficients(sample_h);
    DenseVector x = s.g;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      for (std::size_t k = 0; k < x.size(); ++k) x[k] -= alpha[j] * xs[j][k];
    }
    const double own = alpha.back();
    for (double& v : x) v /= own;
    xs.push_back(std::move(x));
  }
  return xs;
}

}  // namespace hpr
