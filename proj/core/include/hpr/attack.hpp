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

// Malicious-server side of the hyperplane attack: parameter crafting, the
// parallel bias search over one random direction, and batch reconstruction
// from the resulting strips.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hpr/data.hpp"
#include "hpr/federation.hpp"
#include "hpr/model.hpp"
#include "hpr/numerics.hpp"

namespace hpr {

enum class WeightMode { standard, local_steps_robust, noise_robust };

WeightMode parse_weight_mode(const std::string& name);
std::string to_string(WeightMode mode);

/// Default classifier bias; large enough that W2 z1 is absorbed when added
/// in double precision, which makes the softmax exactly uniform.
inline constexpr double kClassifierBias = 1e25;

struct AttackConfig {
  std::size_t neurons = 1000;
  std::size_t classes = 10;
  std::size_t rounds = 10;
  WeightMode weight_mode = WeightMode::standard;
  FeatureBounds feature_bounds;
  double g_equal_tol = 1e-9;
  double residual_tol = 1e-4;
  /// Minimum bias gap worth refining; 0 keeps refining until the round budget.
  double epsilon = 0.0;
  double classifier_bias = kClassifierBias;
  /// Extra hidden layers between the attack layer and the classifier.
  std::size_t hidden_layers = 0;
  std::size_t hidden_width = 100;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// One neuron-round observation.
struct Strip {
  DenseVector g;      // dL/dW_i / dL/db_i
  double h = 0.0;     // dL/db_i
  double bias = 0.0;  // b_i sent that round
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
  double length() const { return high - low; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct SearchState {
  std::vector<Interval> intervals;
  std::vector<Strip> strips;  // ascending bias
  double epsilon = 0.0;
  /// Highest probed bias known to activate no sample. Acts as an empty strip
  /// below the first observation.
  std::optional<double> silent_edge;
  /// Unequal adjacent pairs closer than epsilon in the latest update.
  std::size_t collisions = 0;
};

enum class EqualityMode { exact, projection };

struct StripComparison {
  EqualityMode mode = EqualityMode::exact;
  double g_equal_tol = 1e-9;
  double residual_tol = 1e-4;
};

StripComparison comparison_for(const AttackConfig& cfg);

struct ReconstructionResult {
  std::vector<DenseVector> recovered_inputs;
  std::vector<std::optional<std::size_t>> recovered_labels;
  std::vector<double> per_input_strip_bias;
  /// Reconstructed dL_j/db for each recovered input.
  std::vector<double> per_input_bias_grad;
  std::size_t rounds_used = 0;
  std::size_t collisions = 0;
  std::size_t unrecoverable = 0;
};

// --- crafting -------------------------------------------------------------

/// Standard mode: one w ~ N(0, 1e-2) copied to every attack-layer row, one
/// v ~ N(0, 1e-2) copied to every classifier column, classifier biases set to
/// cfg.classifier_bias. Robust modes change v (and w for local steps).
ModelParams craft_malicious_params(std::size_t d, const AttackConfig& cfg);

/// Row 0 of the attack layer.
DenseVector attack_direction(const ModelParams& params);
/// Column 0 of the classifier layer.
DenseVector class_column(const ModelParams& params);
/// Factor the hidden layers multiply the per-sample bias gradient by, for
/// a crafted deep model whose hidden units are active where u_m > 0.
double hidden_gradient_scale(const ModelParams& params);
/// Writes `biases` into the attack layer.
void set_attack_biases(ModelParams& params, const DenseVector& biases);

// --- search ---------------------------------------------------------------

/// [-max w.x, -min w.x] over the feature box.
Interval initial_interval(const DenseVector& w, const FeatureBounds& bounds);

/// N bias values spread over the live intervals, longer intervals first.
DenseVector update_hyperplanes(const SearchState& state, std::size_t neurons);

/// One strip per neuron whose bias gradient exceeds h_floor.
std::vector<Strip> compute_observations(const GradientReport& report, const DenseVector& biases,
                                        double h_floor);

/// Largest probed bias whose neuron saw no activating sample, if any.
std::optional<double> highest_silent_bias(const GradientReport& report, const DenseVector& biases,
                                          double h_floor);

bool strips_equal(const Strip& a, const Strip& b, const StripComparison& cmp);

SearchState update_search_state(const SearchState& state, std::vector<Strip> new_strips,
                                const StripComparison& cmp);

/// One strip per run of mutually equal neighbours, ascending bias. Each
/// consecutive pair differs by the samples whose boundary lies between them.
std::vector<Strip> plateau_representatives(const SearchState& state, const StripComparison& cmp);

// --- reconstruction -------------------------------------------------------

struct ReconstructOptions {
  /// Crafted classifier column; enables label inference and the jump filter.
  std::optional<DenseVector> class_column;
  double gradient_scale = 1.0;
  double h_floor = 1e-30;
  /// Flag transitions whose per-sample gradient matches no class value.
  bool detect_collisions = true;
  double label_tol = 1e-6;
};

/// Recovers one input per plateau transition. `n` scales bias-gradient
/// jumps to per-sample gradients.
ReconstructionResult reconstruct_batch(std::span<const Strip> plateaus, std::size_t n,
                                       const ReconstructOptions& options = {});

/// Per-sample weights alpha_j = h_j / sum_k h_k of an observation.
std::vector<double> alpha_coefficients(std::span<const double> per_sample_h);

/// Literal sequential recursion: x_{k+1} = (g_{k+1} - sum_j alpha_j x_j) / alpha_{k+1}
/// using previously reconstructed inputs. Numerically weaker than
/// reconstruct_batch for long chains; kept as an independent route.
std::vector<DenseVector> reconstruct_by_alpha_recursion(std::span<const Strip> plateaus,
                                                        std::size_t n);

/// argmin_c |h - scale * (mean(v) - v_c)|; nullopt when the two best
/// classes are within 1e-8 of each other.
std::optional<std::size_t> infer_label(double h_sample, const DenseVector& v, double scale = 1.0);

// --- bounds ---------------------------------------------------------------

/// ceil(log_{floor(N/n)+1}(W / (N eps))) + 1 for N >= n. For N < n each
/// halving level needs up to ceil(n/N) rounds.
std::size_t round_bound(double width, std::size_t neurons, std::size_t n, double epsilon);

/// sqrt(2 pi) * delta_min * confidence / n^2.
double epsilon_for_confidence(double min_distance, std::size_t n, double confidence);

double min_pairwise_distance(std::span<const DenseVector> points);

// --- driver ---------------------------------------------------------------

struct AttackTrace {
  Interval initial;
  DenseVector direction;
  DenseVector class_column;
  std::vector<std::size_t> live_intervals;  // after each round
  std::optional<std::size_t> isolation_round;
  SearchState final_state;
};

/// Full loop: craft once, then per round place biases, query the client,
/// update the search; finally reconstruct.
ReconstructionResult run_attack(const ClientConfig& client, const AttackConfig& cfg,
                                AttackTrace* trace = nullptr);

}  // namespace hpr
