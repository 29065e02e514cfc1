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

// Trap-weights baseline: each neuron hopes to be switched on by a single
// input, in which case dW_i / db_i is that input.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "hpr/federation.hpp"
#include "hpr/model.hpp"
#include "hpr/numerics.hpp"

namespace hpr {

struct CahConfig {
  std::size_t neurons = 1000;
  std::size_t classes = 10;
  double weight_std = 0.7071067811865476;  // N(0, 1/2)
  double scale_factor = 0.99;
  std::size_t rounds = 1;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Row i of W^(1): |N(0, weight_std^2)| magnitudes, ceil(d/2) randomly placed
/// negative entries, the positive entries shrunk by scale_factor. Biases 0.
/// Classifier crafted as in the hyperplane attack's standard mode. The round
/// index is mixed into the seed so every round draws fresh rows.
ModelParams craft_trap_weights(std::size_t d, const CahConfig& cfg, std::size_t round = 0);

/// Decides whether a candidate is a genuine input.
using CandidateCheck = std::function<bool(const DenseVector&)>;

/// Candidates dW_i / db_i of neurons with |db_i| > h_floor that pass `accept`
/// and are farther than `tol` (L2) from every already known input.
std::vector<DenseVector> recover_single_activations(const GradientReport& report,
                                                    const std::vector<DenseVector>& known,
                                                    double tol, const CandidateCheck& accept,
                                                    double h_floor = 1e-30);

/// Ground-truth acceptance: within `tol` (L2) of some true input.
CandidateCheck ground_truth_check(const std::vector<DenseVector>& truth, double tol = 1e-6);

struct CahResult {
  std::vector<DenseVector> recovered_inputs;
  std::size_t rounds_used = 0;
};

/// T rounds against one client, accumulating distinct accepted inputs.
CahResult run_cah(const ClientConfig& client, const CahConfig& cfg, double tol = 1e-6);

}  // namespace hpr
