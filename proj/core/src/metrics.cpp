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

#include "hpr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "hpr/error.hpp"

namespace hpr {

namespace {

std::vector<double> gaussian_window(std::size_t size, double sigma) {
  std::vector<double> w(size * size);
  const double c = (static_cast<double>(size) - 1.0) / 2.0;
  double total = 0.0;
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t q = 0; q < size; ++q) {
      const double dr = static_cast<double>(r) - c;
      const double dq = static_cast<double>(q) - c;
      w[r * size + q] = std::exp(-(dr * dr + dq * dq) / (2.0 * sigma * sigma));
      total += w[r * size + q];
    }
  }
  for (double& v : w) v /= total;
  return w;
}

// Weighted second moment minus the product of means; the same code path for
// (a, a) and (a, b) keeps ssim(x, x) exactly 1.
struct WindowStats {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double cov = 0.0;
};

WindowStats window_stats(std::span<const double> a, std::span<const double> b,
                         const ImageShape& s, std::size_t ch, std::size_t r0, std::size_t c0,
                         std::size_t win, const std::vector<double>& w) {
  WindowStats st;
  double ab = 0.0;
  for (std::size_t r = 0; r < win; ++r) {
    for (std::size_t q = 0; q < win; ++q) {
      const std::size_t idx = ((r0 + r) * s.width + (c0 + q)) * s.channels + ch;
      const double wt = w[r * win + q];
      st.mean_a += wt * a[idx];
      st.mean_b += wt * b[idx];
      ab += wt * (a[idx] * b[idx]);
    }
  }
  st.cov = ab - st.mean_a * st.mean_b;
  return st;
}

}  // namespace

double ssim(std::span<const double> a, std::span<const double> b, const ImageShape& shape,
            const SsimParams& params) {
  if (shape.size() == 0) throw InvalidInput("ssim: empty image shape");
  if (a.size() != shape.size() || b.size() != shape.size()) {
    throw InvalidInput("ssim: image sizes do not match the shape");
  }
  const std::size_t win = std::min({params.window, shape.height, shape.width});
  const auto w = gaussian_window(win, params.sigma);
  const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
  const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);

  double total = 0.0;
  for (std::size_t ch = 0; ch < shape.channels; ++ch) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t r0 = 0; r0 + win <= shape.height; ++r0) {
      for (std::size_t c0 = 0; c0 + win <= shape.width; ++c0) {
        const auto ab = window_stats(a, b, shape, ch, r0, c0, win, w);
        const auto aa = window_stats(a, a, shape, ch, r0, c0, win, w);
        const auto bb = window_stats(b, b, shape, ch, r0, c0, win, w);
        const double num = (2.0 * ab.mean_a * ab.mean_b + c1) * (2.0 * ab.cov + c2);
        const double den = (aa.mean_a * aa.mean_b + bb.mean_a * bb.mean_b + c1) *
                           (aa.cov + bb.cov + c2);
        sum += num / den;
        ++count;
      }
    }
    total += sum / static_cast<double>(count);
  }
  return total / static_cast<double>(shape.channels);
}

namespace {

// Lower is better for both modalities.
class Scorer {
 public:
  Scorer(const Batch& truth, const std::vector<DenseVector>& recovered, const MatchOptions& opt)
      : truth_(truth), recovered_(recovered), opt_(opt) {}

  double key(std::size_t t, std::size_t r) const {
    const auto& x = truth_.inputs[t];
    const auto& y = recovered_[r];
    if (x.size() != y.size()) return std::numeric_limits<double>::infinity();
    if (opt_.image) return -ssim(x.span(), y.span(), *opt_.image);
    return dist2(x.span(), y.span());
  }
  double score(double key) const { return opt_.image ? -key : key; }
  bool passes(double key) const {
    return opt_.image ? -key >= opt_.ssim_threshold : key < opt_.l2_threshold;
  }

 private:
  const Batch& truth_;
  const std::vector<DenseVector>& recovered_;
  const MatchOptions& opt_;
};

using Pairing = std::vector<std::optional<std::size_t>>;

Pairing greedy_pairs(const Scorer& sc, std::size_t nt, std::size_t nr) {
  Pairing pairs(nt);
  std::vector<bool> taken(nr, false);
  using Entry = std::tuple<double, std::size_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  auto best_for = [&](std::size_t t) -> std::optional<Entry> {
    std::optional<Entry> best;
    for (std::size_t r = 0; r < nr; ++r) {
      if (taken[r]) continue;
      const double k = sc.key(t, r);
      if (!best || k < std::get<0>(*best)) best = Entry{k, t, r};
    }
    return best;
  };
  for (std::size_t t = 0; t < nt; ++t) {
    if (auto e = best_for(t)) heap.push(*e);
  }
  while (!heap.empty()) {
    const auto [k, t, r] = heap.top();
    heap.pop();
    if (taken[r]) {
      if (auto e = best_for(t)) heap.push(*e);
      continue;
    }
    taken[r] = true;
    pairs[t] = r;
  }
  return pairs;
}

Pairing optimal_pairs(const Scorer& sc, std::size_t nt, std::size_t nr) {
  if (nt > 12 || nr > 12) throw InvalidInput("optimal matching supports at most 12 x 12");
  std::vector<std::vector<double>> key(nt, std::vector<double>(nr));
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t r = 0; r < nr; ++r) key[t][r] = sc.key(t, r);
  }
  // value = (passing pairs, -total key); lexicographically maximal.
  using Value = std::pair<long, double>;
  const std::size_t masks = std::size_t{1} << nr;
  const Value none{-1, 0.0};
  std::vector<std::vector<Value>> dp(nt + 1, std::vector<Value>(masks, none));
  std::vector<std::vector<int>> choice(nt + 1, std::vector<int>(masks, -2));
  for (std::size_t m = 0; m < masks; ++m) dp[nt][m] = {0, 0.0};
  for (std::size_t t = nt; t-- > 0;) {
    for (std::size_t m = 0; m < masks; ++m) {
      Value best = dp[t + 1][m];
      int pick = -1;
      for (std::size_t r = 0; r < nr; ++r) {
        if (m & (std::size_t{1} << r)) continue;
        const Value rest = dp[t + 1][m | (std::size_t{1} << r)];
        const double k = std::isfinite(key[t][r]) ? key[t][r] : 1e300;
        const Value cand{rest.first + (sc.passes(key[t][r]) ? 1 : 0), rest.second - k};
        if (cand > best) {
          best = cand;
          pick = static_cast<int>(r);
        }
      }
      dp[t][m] = best;
      choice[t][m] = pick;
    }
  }
  Pairing pairs(nt);
  std::size_t m = 0;
  for (std::size_t t = 0; t < nt; ++t) {
    const int r = choice[t][m];
    if (r >= 0) {
      pairs[t] = static_cast<std::size_t>(r);
      m |= std::size_t{1} << r;
    }
  }
  return pairs;
}

}  // namespace

std::vector<std::optional<std::size_t>> match_pairs(const Batch& truth,
                                                    const std::vector<DenseVector>& recovered,
                                                    const MatchOptions& options) {
  if (options.image) {
    for (const auto& x : truth.inputs) {
      if (x.size() != options.image->size()) {
        throw InvalidInput("match_reconstructions: truth does not match the image shape");
      }
    }
  }
  const Scorer sc(truth, recovered, options);
  return options.optimal ? optimal_pairs(sc, truth.size(), recovered.size())
                         : greedy_pairs(sc, truth.size(), recovered.size());
}

RecoveryStats match_reconstructions(const Batch& truth, const std::vector<DenseVector>& recovered,
                                    const MatchOptions& options,
                                    const std::vector<std::optional<std::size_t>>* labels) {
  if (labels && labels->size() != recovered.size()) {
    throw InvalidInput("match_reconstructions: one label slot per recovered vector expected");
  }
  const auto pairs = match_pairs(truth, recovered, options);
  const Scorer sc(truth, recovered, options);
  RecoveryStats st;
  st.n_true = truth.size();
  st.per_sample_error.resize(truth.size());
  std::size_t paired = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (!pairs[t]) continue;
    ++paired;
    const double k = sc.key(t, *pairs[t]);
    st.per_sample_error[t] = sc.score(k);
    if (!sc.passes(k)) continue;
    ++st.n_recovered_exact;
    if (labels && (*labels)[*pairs[t]]) {
      ++st.labels_known;
      if (t < truth.labels.size() && *(*labels)[*pairs[t]] == truth.labels[t]) {
        ++st.labels_correct;
      }
    }
  }
  st.unmatched_recovered = recovered.size() - paired;
  st.fraction = truth.size() == 0 ? 0.0
                                  : static_cast<double>(st.n_recovered_exact) /
                                        static_cast<double>(truth.size());
  return st;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  double s = 0.0;
  for (double v : values) s += v;
  out.mean = s / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
  return out;
}

namespace {

std::vector<std::vector<bool>> relu_masks(const ModelParams& params, const Batch& batch) {
  std::vector<std::vector<bool>> masks;
  for (const auto& x : batch.inputs) {
    const auto pass = forward(params, x);
    std::vector<bool> m;
    for (std::size_t l = 0; l + 1 < pass.linear.size(); ++l) {
      for (double z : pass.linear[l]) m.push_back(z > 0.0);
    }
    masks.push_back(std::move(m));
  }
  return masks;
}

}  // namespace

GradientCheck check_gradient(const ModelParams& params, const Batch& batch, double step) {
  if (!(step > 0.0)) throw InvalidInput("check_gradient: step must be > 0");
  const GradientReport analytic = batch_gradient(params, batch);
  const auto base_masks = relu_masks(params, batch);
  GradientCheck out;
  ModelParams probe = params;

  auto check_one = [&](double& slot, double a) {
    const double keep = slot;
    slot = keep + step;
    const double up = mean_loss(probe, batch);
    const bool up_same = relu_masks(probe, batch) == base_masks;
    slot = keep - step;
    const double down = mean_loss(probe, batch);
    const bool down_same = relu_masks(probe, batch) == base_masks;
    slot = keep;
    if (!up_same || !down_same) {
      ++out.skipped;
      return;
    }
    const double f = (up - down) / (2.0 * step);
    const double err = std::abs(a - f) / std::max({1.0, std::abs(a), std::abs(f)});
    out.max_rel_error = std::max(out.max_rel_error, err);
    ++out.checked;
  };

  for (std::size_t l = 0; l < probe.layers.size(); ++l) {
    auto w = probe.layers[l].weights.data();
    const auto aw = analytic.layers[l].weights.data();
    for (std::size_t i = 0; i < w.size(); ++i) check_one(w[i], aw[i]);
    auto& b = probe.layers[l].biases;
    for (std::size_t i = 0; i < b.size(); ++i) check_one(b[i], analytic.layers[l].biases[i]);
  }
  return out;
}

}  // namespace hpr
