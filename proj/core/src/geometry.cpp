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

#include "hpr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hpr/error.hpp"

namespace hpr {

void PointCloud::validate() const {
  if (points.empty()) throw InvalidInput("PointCloud: empty");
  const std::size_t d = points.front().size();
  if (d == 0) throw InvalidInput("PointCloud: zero-dimensional points");
  for (const auto& p : points) {
    if (p.size() != d) throw InvalidInput("PointCloud: ragged points");
  }
}

namespace {

constexpr double kPivotTol = 1e-12;

// Dense phase-one simplex on [A | I | b] with Bland's rule. Returns the
// minimal sum of artificial variables.
class PhaseOne {
 public:
  PhaseOne(std::size_t rows, std::size_t cols) : m_(rows), k_(cols), width_(cols + rows + 1) {
    tab_.assign(m_ * width_, 0.0);
    basis_.resize(m_);
    for (std::size_t r = 0; r < m_; ++r) {
      basis_[r] = k_ + r;
      at(r, k_ + r) = 1.0;
    }
  }

  double& at(std::size_t r, std::size_t c) { return tab_[r * width_ + c]; }
  double& rhs(std::size_t r) { return at(r, width_ - 1); }

  double solve() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (rhs(r) < 0.0) {
        for (std::size_t c = 0; c < k_; ++c) at(r, c) = -at(r, c);
        rhs(r) = -rhs(r);
      }
    }
    std::vector<double> reduced(k_);
    const std::size_t cap = 50 * (m_ + k_) + 1000;
    for (std::size_t iter = 0; iter < cap; ++iter) {
      // Reduced cost of structural column j is -sum of its entries in
      // artificial-basis rows.
      std::size_t enter = k_;
      for (std::size_t j = 0; j < k_; ++j) {
        double rc = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
          if (basis_[r] >= k_) rc -= at(r, j);
        }
        if (rc < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter == k_) return infeasibility();

      std::size_t leave = m_;
      double best = 0.0;
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = at(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = rhs(r) / a;
        if (leave == m_ || ratio < best || (ratio == best && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave == m_) return infeasibility();
      pivot(leave, enter);
    }
    throw std::runtime_error("phase-one simplex did not terminate");
  }

 private:
  double infeasibility() {
    double w = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] >= k_) w += rhs(r);
    }
    return w;
  }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    for (std::size_t c = 0; c < width_; ++c) at(pr, c) /= p;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width_; ++c) at(r, c) -= f * at(pr, c);
    }
    basis_[pr] = pc;
  }

  std::size_t m_;
  std::size_t k_;
  std::size_t width_;
  std::vector<double> tab_;
  std::vector<std::size_t> basis_;
};

}  // namespace

bool is_separable(const PointCloud& cloud, std::size_t i, double tol) {
  cloud.validate();
  if (i >= cloud.size()) throw InvalidInput("is_separable: index out of range");
  const std::size_t d = cloud.dim();
  const std::size_t others = cloud.size() - 1;
  if (others == 0) return true;

  const DenseVector& target = cloud.points[i];
  PhaseOne lp(d + 1, others);
  std::size_t col = 0;
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    if (k == i) continue;
    for (std::size_t r = 0; r < d; ++r) lp.at(r, col) = cloud.points[k][r];
    lp.at(d, col) = 1.0;
    ++col;
  }
  double scale = 1.0;
  for (std::size_t r = 0; r < d; ++r) {
    lp.rhs(r) = target[r];
    scale = std::max(scale, std::abs(target[r]));
  }
  lp.rhs(d) = 1.0;
  return lp.solve() > tol * scale;
}

std::vector<bool> separable_points(const PointCloud& cloud, double tol) {
  std::vector<bool> flags(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) flags[i] = is_separable(cloud, i, tol);
  return flags;
}

std::size_t hull_vertex_count(const PointCloud& cloud, double tol) {
  const auto flags = separable_points(cloud, tol);
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
}

std::vector<std::size_t> planar_hull_vertices(const PointCloud& cloud) {
  cloud.validate();
  if (cloud.dim() != 2) throw InvalidInput("planar_hull_vertices: cloud is not planar");
  const auto& pts = cloud.points;
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pts[a][0] != pts[b][0]) return pts[a][0] < pts[b][0];
    if (pts[a][1] != pts[b][1]) return pts[a][1] < pts[b][1];
    return a < b;
  });
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    return (pts[a][0] - pts[o][0]) * (pts[b][1] - pts[o][1]) -
           (pts[a][1] - pts[o][1]) * (pts[b][0] - pts[o][0]);
  };
  auto same = [&](std::size_t a, std::size_t b) {
    return pts[a][0] == pts[b][0] && pts[a][1] == pts[b][1];
  };

  // Unique points only; duplicates are dealt with at the end.
  std::vector<std::size_t> uniq;
  for (std::size_t idx : order) {
    if (uniq.empty() || !same(uniq.back(), idx)) uniq.push_back(idx);
  }
  if (uniq.size() == 1) {
    return pts.size() == 1 ? std::vector<std::size_t>{0} : std::vector<std::size_t>{};
  }

  std::vector<std::size_t> hull;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t base = hull.size();
    for (std::size_t step = 0; step < uniq.size(); ++step) {
      const std::size_t idx = pass == 0 ? uniq[step] : uniq[uniq.size() - 1 - step];
      while (hull.size() >= base + 2 && cross(hull[hull.size() - 2], hull.back(), idx) <= 0.0) {
        hull.pop_back();
      }
      hull.push_back(idx);
    }
    hull.pop_back();
  }

  std::vector<std::size_t> result;
  for (std::size_t v : hull) {
    bool duplicated = false;
    for (std::size_t k = 0; k < pts.size() && !duplicated; ++k) {
      duplicated = k != v && same(k, v);
    }
    if (!duplicated) result.push_back(v);
  }
  std::sort(result.begin(), result.end());
  result.erase(std::unique(result.begin(), result.end()), result.end());
  return result;
}

double theoretical_order(Distribution dist, double n, std::size_t d) {
  if (!(n >= 2.0)) throw InvalidInput("theoretical_order: n must be >= 2");
  const double dd = static_cast<double>(d);
  switch (dist) {
    case Distribution::ball:
      return std::pow(n, (dd - 1.0) / (dd + 1.0));
    case Distribution::cube:
      return std::pow(std::log(n), dd - 1.0);
    case Distribution::gauss:
      return std::pow(std::log(n), (dd - 1.0) / 2.0);
  }
  return 0.0;
}

}  // namespace hpr
