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
#include <numeric>

#include "hpr/attack.hpp"
#include "hpr/error.hpp"

namespace hpr {

Interval initial_interval(const DenseVector& w, const FeatureBounds& bounds) {
  bounds.validate();
  if (w.size() != bounds.size()) throw InvalidInput("initial_interval: dimension mismatch");
  double max_proj = 0.0;
  double min_proj = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double a = w[j] * bounds.lo[j];
    const double b = w[j] * bounds.hi[j];
    max_proj += std::max(a, b);
    min_proj += std::min(a, b);
  }
  return {-max_proj, -min_proj};
}

DenseVector update_hyperplanes(const SearchState& state, std::size_t neurons) {
  if (state.intervals.empty()) throw InvalidInput("update_hyperplanes: no live intervals");
  if (neurons == 0) throw InvalidInput("update_hyperplanes: need at least one neuron");

  std::vector<Interval> order = state.intervals;
  std::stable_sort(order.begin(), order.end(), [](const Interval& a, const Interval& b) {
    if (a.length() != b.length()) return a.length() > b.length();
    return a.low < b.low;
  });

  const std::size_t m = order.size();
  std::vector<std::size_t> counts(m, 0);
  if (m > neurons) {
    std::fill(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(neurons), 1);
  } else {
    const std::size_t q = neurons / m;
    const std::size_t r = neurons % m;
    for (std::size_t k = 0; k < m; ++k) counts[k] = q + (k < r ? 1 : 0);
  }

  DenseVector out(neurons);
  std::size_t pos = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double lo = order[k].low;
    const double len = order[k].length();
    const double parts = static_cast<double>(counts[k] + 1);
    for (std::size_t i = 1; i <= counts[k]; ++i) {
      out[pos++] = lo + static_cast<double>(i) * len / parts;
    }
  }
  return out;
}

std::vector<Strip> compute_observations(const GradientReport& report, const DenseVector& biases,
                                        double h_floor) {
  if (report.layers.empty()) throw ProtocolError("observation: empty gradient report");
  const auto& first = report.layers.front();
  if (first.biases.size() != biases.size() || first.weights.rows() != biases.size()) {
    throw ProtocolError("observation: attack-layer shape does not match the sent biases");
  }
  std::vector<Strip> strips;
  for (std::size_t i = 0; i < biases.size(); ++i) {
    const double h = first.biases[i];
    if (!(std::abs(h) > h_floor)) continue;
    const auto row = first.weights.row(i);
    DenseVector g(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) g[c] = row[c] / h;
    if (!g.all_finite()) continue;
    strips.push_back({std::move(g), h, biases[i]});
  }
  return strips;
}

std::optional<double> highest_silent_bias(const GradientReport& report, const DenseVector& biases,
                                          double h_floor) {
  const auto& first = report.layers.front();
  std::optional<double> best;
  for (std::size_t i = 0; i < biases.size(); ++i) {
    const auto row = first.weights.row(i);
    const bool silent = std::abs(first.biases[i]) <= h_floor &&
                        std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; });
    if (silent && (!best || biases[i] > *best)) best = biases[i];
  }
  return best;
}

bool strips_equal(const Strip& a, const Strip& b, const StripComparison& cmp) {
  if (a.g.size() != b.g.size()) return false;
  if (cmp.mode == EqualityMode::exact) {
    double diff = 0.0;
    for (std::size_t k = 0; k < a.g.size(); ++k) diff = std::max(diff, std::abs(a.g[k] - b.g[k]));
    const double scale = std::max(norm_inf(a.g.span()), norm_inf(b.g.span()));
    if (diff > cmp.g_equal_tol * scale) return false;
    return std::abs(a.h - b.h) <= cmp.g_equal_tol * std::max(1.0, std::abs(a.h));
  }
  const Strip& hi = a.bias >= b.bias ? a : b;
  const Strip& lo = a.bias >= b.bias ? b : a;
  const double denom = dot(lo.g.span(), lo.g.span());
  if (!(denom > 0.0)) return norm2(hi.g.span()) < cmp.residual_tol;
  const double coef = dot(hi.g.span(), lo.g.span()) / denom;
  double sq = 0.0;
  for (std::size_t k = 0; k < hi.g.size(); ++k) {
    const double r = hi.g[k] - coef * lo.g[k];
    sq += r * r;
  }
  return std::sqrt(sq) < cmp.residual_tol;
}

namespace {

// Runs of consecutive equal strips, as [begin, end) index pairs.
std::vector<std::pair<std::size_t, std::size_t>> plateaus(const std::vector<Strip>& strips,
                                                          const StripComparison& cmp) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= strips.size(); ++i) {
    if (i == strips.size() || !strips_equal(strips[i - 1], strips[i], cmp)) {
      if (begin < i) runs.emplace_back(begin, i);
      begin = i;
    }
  }
  return runs;
}

}  // namespace

SearchState update_search_state(const SearchState& state, std::vector<Strip> new_strips,
                                const StripComparison& cmp) {
  std::vector<Strip> merged = state.strips;
  merged.insert(merged.end(), std::make_move_iterator(new_strips.begin()),
                std::make_move_iterator(new_strips.end()));
  std::stable_sort(merged.begin(), merged.end(),
                   [](const Strip& a, const Strip& b) { return a.bias < b.bias; });

  SearchState next;
  next.epsilon = state.epsilon;
  next.silent_edge = state.silent_edge;

  // A strip at or below the silent edge cannot exist without noise; such
  // strips rule the edge out as a lower sentinel.
  if (next.silent_edge && !merged.empty() && merged.front().bias <= *next.silent_edge) {
    next.silent_edge.reset();
  }

  const auto runs = plateaus(merged, cmp);
  auto add_gap = [&](double low, double high) {
    const double gap = high - low;
    if (gap > 0.0 && gap >= next.epsilon) {
      next.intervals.push_back({low, high});
    } else {
      ++next.collisions;
    }
  };

  if (next.silent_edge && !runs.empty()) add_gap(*next.silent_edge, merged[runs.front().first].bias);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto [begin, end] = runs[r];
    next.strips.push_back(merged[begin]);
    if (end - begin > 1) next.strips.push_back(merged[end - 1]);
    if (r + 1 < runs.size()) add_gap(merged[end - 1].bias, merged[runs[r + 1].first].bias);
  }
  return next;
}

std::vector<Strip> plateau_representatives(const SearchState& state, const StripComparison& cmp) {
  std::vector<Strip> reps;
  for (const auto& [begin, end] : plateaus(state.strips, cmp)) {
    reps.push_back(state.strips[end - 1]);
  }
  return reps;
}

}  // namespace hpr
