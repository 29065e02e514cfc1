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

#include "hpr/federation.hpp"

#include <numeric>
#include <string>

#include "hpr/error.hpp"

namespace hpr {

void ClientConfig::validate() const {
  if (!(noise_std >= 0.0)) throw ConfigError("client: noise_std must be >= 0");
  if (batch.inputs.empty()) throw ConfigError("client: empty dataset");
  if (const auto* local = std::get_if<LocalSteps>(&mode)) {
    if (local->steps == 0 || local->minibatch == 0) {
      throw ConfigError("client: local steps and minibatch size must be positive");
    }
    if (local->steps * local->minibatch > batch.size()) {
      throw ConfigError("client: " + std::to_string(local->steps) + " steps x " +
                        std::to_string(local->minibatch) + " samples exceeds dataset size " +
                        std::to_string(batch.size()));
    }
    if (!(local->learning_rate > 0.0)) throw ConfigError("client: learning rate must be > 0");
  }
}

GradientReport ClientResponse::as_gradient() const {
  if (!is_delta) return update;
  GradientReport g = update;
  for (auto& layer : g.layers) {
    for (double& v : layer.weights.data()) v = -v;
    for (double& v : layer.biases) v = -v;
  }
  return g;
}

namespace {

void sgd_step(ModelParams& params, const GradientReport& grad, double lr) {
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto w = params.layers[l].weights.data();
    const auto gw = grad.layers[l].weights.data();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * gw[i];
    auto& b = params.layers[l].biases;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] -= lr * grad.layers[l].biases[i];
  }
}

GradientReport local_epoch(const ClientConfig& config, const LocalSteps& local,
                           const ModelParams& received) {
  std::vector<std::size_t> order(config.batch.size());
  std::iota(order.begin(), order.end(), 0);
  SeededRng shuffle_rng = SeededRng(config.rng_seed).fork(0x5348554646ULL);
  shuffle_rng.shuffle(order);

  ModelParams current = received;
  for (std::size_t step = 0; step < local.steps; ++step) {
    Batch mini;
    for (std::size_t k = 0; k < local.minibatch; ++k) {
      const std::size_t idx = order[step * local.minibatch + k];
      mini.inputs.push_back(config.batch.inputs[idx]);
      mini.labels.push_back(config.batch.labels[idx]);
    }
    sgd_step(current, batch_gradient(current, mini, config.precision), local.learning_rate);
  }

  GradientReport delta = zero_gradient(received);
  for (std::size_t l = 0; l < received.layers.size(); ++l) {
    auto out = delta.layers[l].weights.data();
    const auto fin = current.layers[l].weights.data();
    const auto ini = received.layers[l].weights.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (fin[i] - ini[i]) / local.learning_rate;
    auto& ob = delta.layers[l].biases;
    for (std::size_t i = 0; i < ob.size(); ++i) {
      ob[i] = (current.layers[l].biases[i] - received.layers[l].biases[i]) / local.learning_rate;
    }
  }
  return delta;
}

}  // namespace

ClientResponse client_round(const ClientConfig& config, const ModelParams& params,
                            std::size_t round_index) {
  config.validate();
  if (config.batch.dim() != params.input_dim()) {
    throw InvalidInput("client_round: model input dimension does not match client data");
  }

  ClientResponse response;
  response.round_index = round_index;
  if (config.report_sample_count) response.sample_count = config.batch.size();

  if (const auto* local = std::get_if<LocalSteps>(&config.mode)) {
    response.update = local_epoch(config, *local, params);
    response.is_delta = true;
  } else {
    response.update = batch_gradient(params, config.batch, config.precision);
  }

  // Noise goes on the transmitted update, after any local computation.
  if (config.noise_std > 0.0) {
    SeededRng noise = SeededRng(config.rng_seed).fork(0x4e4f495345ULL ^ round_index);
    for (auto& layer : response.update.layers) {
      for (double& v : layer.weights.data()) v += noise.normal(0.0, config.noise_std);
      for (double& v : layer.biases) v += noise.normal(0.0, config.noise_std);
    }
  }
  return response;
}

}  // namespace hpr
