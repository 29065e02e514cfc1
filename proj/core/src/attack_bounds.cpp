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

#include <cmath>
#include <limits>
#include <numbers>

#include "hpr/attack.hpp"
#include "hpr/error.hpp"

namespace hpr {

namespace {

// Smallest t >= 0 with base^t >= ratio, by repeated multiplication so that
// exact powers do not round up through log().
std::size_t ceil_log(double ratio, double base) {
  std::size_t t = 0;
  double power = 1.0;
  while (power < ratio) {
    power *= base;
    ++t;
  }
  return t;
}

}  // namespace

std::size_t round_bound(double width, std::size_t neurons, std::size_t n, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidInput("round_bound: epsilon must be > 0");
  if (!(width > 0.0) || !std::isfinite(width)) throw InvalidInput("round_bound: bad width");
  if (neurons == 0 || n == 0) throw InvalidInput("round_bound: counts must be >= 1");
  const double ratio = width / (static_cast<double>(neurons) * epsilon);
  if (neurons >= n) {
    const double base = static_cast<double>(neurons / n + 1);
    return ceil_log(ratio, base) + 1;
  }
  const std::size_t per_level = (n + neurons - 1) / neurons;
  return per_level * ceil_log(ratio, 2.0) + 1;
}

double epsilon_for_confidence(double min_distance, std::size_t n, double confidence) {
  if (!(min_distance > 0.0)) throw InvalidInput("epsilon_for_confidence: distance must be > 0");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw InvalidInput("epsilon_for_confidence: confidence must lie in (0, 1)");
  }
  if (n == 0) throw InvalidInput("epsilon_for_confidence: n must be >= 1");
  const double nn = static_cast<double>(n);
  return std::sqrt(2.0 * std::numbers::pi) * min_distance * confidence / (nn * nn);
}

double min_pairwise_distance(std::span<const DenseVector> points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      best = std::min(best, dist2(points[a].span(), points[b].span()));
    }
  }
  return best;
}

}  // namespace hpr
