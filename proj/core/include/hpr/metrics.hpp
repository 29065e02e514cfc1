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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hpr/model.hpp"
#include "hpr/numerics.hpp"

namespace hpr {

/// Tabular inputs count as recovered below this L2 distance.
inline constexpr double kL2Threshold = 0.1;
/// Image inputs count as recovered at or above this SSIM.
inline constexpr double kSsimThreshold = 0.99;

struct SsimParams {
  std::size_t window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

struct ImageShape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;
  std::size_t size() const { return height * width * channels; }
};

/// Mean SSIM over all valid window positions, averaged over channels.
/// Images are height x width x channels, channel fastest. The window shrinks
/// to the image when the image is smaller than it.
double ssim(std::span<const double> a, std::span<const double> b, const ImageShape& shape,
            const SsimParams& params = {});

struct RecoveryStats {
  std::size_t n_true = 0;
  std::size_t n_recovered_exact = 0;
  double fraction = 0.0;
  /// Score of each truth's partner (L2, or SSIM for images); empty when unpaired.
  std::vector<std::optional<double>> per_sample_error;
  std::size_t unmatched_recovered = 0;
  /// Recovered truths whose inferred label was known / correct.
  std::size_t labels_known = 0;
  std::size_t labels_correct = 0;
  std::size_t rounds_used = 0;
  double wall_time_seconds = 0.0;
};

struct MatchOptions {
  std::optional<ImageShape> image;
  /// Exhaustive assignment maximizing passing pairs (ties: best total score).
  /// Limited to 12 truths and 12 recovered vectors.
  bool optimal = false;
  double l2_threshold = kL2Threshold;
  double ssim_threshold = kSsimThreshold;
};

/// Greedy global-best one-to-one pairing of truth and recovered vectors.
/// `labels`, when given, holds the inferred label of each recovered vector.
RecoveryStats match_reconstructions(const Batch& truth, const std::vector<DenseVector>& recovered,
                                    const MatchOptions& options = {},
                                    const std::vector<std::optional<std::size_t>>* labels = nullptr);

/// pairs[t] = index of recovered vector paired with truth t, if any.
std::vector<std::optional<std::size_t>> match_pairs(const Batch& truth,
                                                    const std::vector<DenseVector>& recovered,
                                                    const MatchOptions& options = {});

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for fewer than two values
};

MeanStd mean_std(std::span<const double> values);

struct GradientCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
};

/// Central differences of mean_loss against batch_gradient for every
/// parameter. Error is |a - f| / max(1, |a|, |f|). Parameters whose +-step
/// perturbation flips any ReLU of any sample are skipped.
GradientCheck check_gradient(const ModelParams& params, const Batch& batch, double step = 1e-6);

}  // namespace hpr
