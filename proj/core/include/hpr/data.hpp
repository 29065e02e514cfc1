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
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hpr/model.hpp"

namespace hpr {

/// Per-feature [lo, hi] box known to the server after preprocessing.
struct FeatureBounds {
  std::vector<double> lo;
  std::vector<double> hi;

  static FeatureBounds uniform(std::size_t dim, double lo, double hi);

  std::size_t size() const { return lo.size(); }
  /// Throws InvalidInput unless lo < hi and both are finite for every feature.
  void validate() const;
  bool contains(const DenseVector& x) const;
};

enum class Distribution { ball, cube, gauss };

Distribution parse_distribution(const std::string& name);
std::string to_string(Distribution dist);

/// Clip level used for Gaussian data; points are clipped to +-6 per
/// coordinate so the server-side bounds are finite.
inline constexpr double kGaussianClip = 6.0;

struct LabeledData {
  Batch batch;
  FeatureBounds bounds;
};

/// ball: uniform in the unit d-ball; cube: uniform in [0,1]^d; gauss:
/// standard normal clipped to +-6. Labels uniform over `classes`.
LabeledData gen_synthetic(Distribution dist, std::size_t n, std::size_t d, std::size_t classes,
                          std::uint64_t seed);

enum class Scaling { minus1to1, zero1, none };

Scaling parse_scaling(const std::string& name);

/// Affine per-column transform computed on the loaded data.
struct ColumnScaler {
  std::vector<double> col_min;
  std::vector<double> col_max;
  Scaling scaling = Scaling::none;

  double target_lo() const;
  double target_hi() const;
  double apply(std::size_t col, double value) const;
  double invert(std::size_t col, double scaled) const;
};

ColumnScaler fit_scaler(const std::vector<DenseVector>& rows, Scaling scaling);

/// Comma-separated numeric file with a header row. `label_column` is a header
/// name or a zero-based index. Labels must be integer coded.
LabeledData load_csv(const std::filesystem::path& path, const std::string& label_column,
                     Scaling scaling, ColumnScaler* scaler_out = nullptr);

/// Writes inputs plus a trailing `label` column.
void save_csv(const std::filesystem::path& path, const Batch& batch);

/// Raw tensor format: "HRT1", u32 n, u32 d (little endian), then n*d
/// little-endian float64 values, sample-major. No labels are stored; they are
/// drawn uniformly over `classes` from `label_seed`.
LabeledData load_tensor(const std::filesystem::path& path, std::size_t classes = 10,
                        std::uint64_t label_seed = 0);
void save_tensor(const std::filesystem::path& path, const std::vector<DenseVector>& inputs);

/// Keeps only samples whose label lies in the class block of `client`,
/// preserving order. Blocks come from one seeded permutation of the labels,
/// so distinct clients under the same seed never share a label.
Batch partition_non_iid(const Batch& batch, std::size_t classes, std::size_t classes_per_client,
                        std::uint64_t seed, std::size_t client = 0);

/// Sorted label block [client * k, (client + 1) * k) of the seeded permutation.
std::vector<std::size_t> chosen_classes(std::size_t classes, std::size_t classes_per_client,
                                        std::uint64_t seed, std::size_t client = 0);

/// Seeded subset of `n` samples (order of the seeded permutation).
Batch subsample(const Batch& batch, std::size_t n, std::uint64_t seed);

}  // namespace hpr
