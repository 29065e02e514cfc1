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
#include <string>

#include "hpr/attack.hpp"
#include "hpr/error.hpp"

namespace hpr {

namespace {

void check_response_shape(const GradientReport& grad, const ModelParams& params) {
  if (grad.layers.size() != params.layers.size()) {
    throw ProtocolError("client response has " + std::to_string(grad.layers.size()) +
                        " layers, expected " + std::to_string(params.layers.size()));
  }
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& got = grad.layers[l];
    const auto& want = params.layers[l];
    if (got.weights.rows() != want.weights.rows() || got.weights.cols() != want.weights.cols() ||
        got.biases.size() != want.biases.size()) {
      throw ProtocolError("client response layer " + std::to_string(l) + " has the wrong shape");
    }
  }
}

// First sweep: N-1 interior points plus one probe at the top of the range,
// which activates every sample and anchors the highest transition.
DenseVector first_round_biases(const Interval& range, std::size_t neurons) {
  DenseVector out(neurons);
  if (neurons > 1) {
    SearchState seed;
    seed.intervals.push_back(range);
    const DenseVector inner = update_hyperplanes(seed, neurons - 1);
    std::copy(inner.begin(), inner.end(), out.begin());
  }
  out[neurons - 1] = range.high;
  return out;
}

}  // namespace

ReconstructionResult run_attack(const ClientConfig& client, const AttackConfig& cfg,
                                AttackTrace* trace) {
  cfg.validate();
  client.validate();
  const std::size_t d = client.batch.dim();
  if (cfg.feature_bounds.size() != d) {
    throw ConfigError("attack: feature bounds have dimension " +
                      std::to_string(cfg.feature_bounds.size()) + ", client data has " +
                      std::to_string(d));
  }

  ModelParams params = craft_malicious_params(d, cfg);
  const DenseVector w = attack_direction(params);
  const DenseVector v = class_column(params);
  const Interval range = initial_interval(w, cfg.feature_bounds);
  const StripComparison cmp = comparison_for(cfg);
  const bool exact = cmp.mode == EqualityMode::exact;

  SearchState state;
  state.intervals.push_back(range);
  state.epsilon = cfg.epsilon;
  state.silent_edge = range.low;

  AttackTrace local_trace;
  AttackTrace& tr = trace ? *trace : local_trace;
  tr = AttackTrace{};
  tr.initial = range;
  tr.direction = w;
  tr.class_column = v;

  std::optional<std::size_t> reported_n;
  std::size_t rounds_used = 0;
  for (std::size_t round = 0; round < cfg.rounds && !state.intervals.empty(); ++round) {
    const DenseVector biases =
        round == 0 ? first_round_biases(range, cfg.neurons) : update_hyperplanes(state, cfg.neurons);
    set_attack_biases(params, biases);

    const ClientResponse response = client_round(client, params, round);
    check_response_shape(response.update, params);
    if (response.sample_count) {
      if (*response.sample_count == 0) throw ProtocolError("client reported zero samples");
      reported_n = response.sample_count;
    }
    const GradientReport grad = response.as_gradient();
    const double h_floor = 1e-30 * static_cast<double>(reported_n.value_or(1));

    std::vector<Strip> strips = compute_observations(grad, biases, h_floor);
    if (exact) {
      const auto silent = highest_silent_bias(grad, biases, h_floor);
      if (silent && (!state.silent_edge || *silent > *state.silent_edge)) {
        state.silent_edge = silent;
      }
    }
    state = update_search_state(state, std::move(strips), cmp);
    ++rounds_used;
    tr.live_intervals.push_back(state.intervals.size());

    // With a known batch size, n distinct plateaus above the empty sentinel
    // means every transition holds exactly one input.
    if (exact && reported_n && !tr.isolation_round &&
        plateau_representatives(state, cmp).size() == *reported_n) {
      tr.isolation_round = rounds_used;
      break;
    }
  }

  const std::vector<Strip> reps = plateau_representatives(state, cmp);

  ReconstructOptions options;
  options.class_column = v;
  options.gradient_scale = hidden_gradient_scale(params);
  options.detect_collisions = exact && reported_n.has_value() && cfg.hidden_layers == 0;
  std::size_t scale_n = std::max<std::size_t>(reps.size(), 1);
  if (const auto* local = std::get_if<LocalSteps>(&client.mode)) {
    scale_n = local->minibatch;
  } else if (reported_n) {
    scale_n = *reported_n;
  }
  options.h_floor = 1e-30 * static_cast<double>(scale_n);

  ReconstructionResult result = reconstruct_batch(reps, scale_n, options);
  result.rounds_used = rounds_used;
  tr.final_state = state;
  return result;
}

}  // namespace hpr
