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
#include <optional>
#include <variant>

#include "hpr/model.hpp"

namespace hpr {

struct FullBatch {};

/// One local epoch of plain minibatch SGD: `steps` sequential steps over
/// disjoint minibatches of `minibatch` samples drawn from one seeded
/// permutation of the client's data.
struct LocalSteps {
  std::size_t steps = 1;
  std::size_t minibatch = 1;
  double learning_rate = 1e-4;
};

using ClientMode = std::variant<FullBatch, LocalSteps>;

struct ClientConfig {
  Batch batch;
  ClientMode mode = FullBatch{};
  double noise_std = 0.0;
  std::uint64_t rng_seed = 0;
  Precision precision = Precision::f64;
  /// FedAvg-style clients send their sample count alongside the update.
  bool report_sample_count = true;

  /// Throws ConfigError when the minibatch partition is infeasible or the
  /// noise level is negative.
  void validate() const;
};

/// A ModelParams-shaped update. `is_delta` distinguishes a full-batch
/// gradient from an effective update (final - received) / learning_rate.
struct ClientResponse {
  GradientReport update;
  bool is_delta = false;
  std::size_t round_index = 0;
  std::optional<std::size_t> sample_count;

  /// Gradient-like view: the gradient itself, or minus the scaled delta.
  GradientReport as_gradient() const;
};

/// Simulates one FedSGD/FedAvg round on the client. Deterministic in
/// (config, params, round_index).
ClientResponse client_round(const ClientConfig& config, const ModelParams& params,
                            std::size_t round_index = 0);

}  // namespace hpr
