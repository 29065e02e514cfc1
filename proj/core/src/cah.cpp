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

#include "hpr/cah.hpp"

#include <cmath>
#include <numeric>

#include "hpr/attack.hpp"
#include "hpr/error.hpp"

namespace hpr {

void CahConfig::validate() const {
  if (neurons == 0) throw ConfigError("cah: neurons must be >= 1");
  if (rounds == 0) throw ConfigError("cah: rounds must be >= 1");
  if (classes < 2) throw ConfigError("cah: need at least two classes");
  if (!(weight_std > 0.0)) throw ConfigError("cah: weight_std must be > 0");
  if (!(scale_factor > 0.0 && scale_factor < 1.0)) {
    throw ConfigError("cah: scale factor must lie in (0, 1)");
  }
}

ModelParams craft_trap_weights(std::size_t d, const CahConfig& cfg, std::size_t round) {
  if (d < 2) throw InvalidInput("craft_trap_weights: d must be >= 2");
  cfg.validate();

  // The classifier reuses the attack's standard crafting so that the
  // per-sample bias gradients never vanish.
  AttackConfig head;
  head.neurons = cfg.neurons;
  head.classes = cfg.classes;
  head.feature_bounds = FeatureBounds::uniform(d, 0.0, 1.0);
  head.rng_seed = mix_seed(cfg.rng_seed, 0x48454144ULL);
  ModelParams params = craft_malicious_params(d, head);

  SeededRng rng(mix_seed(cfg.rng_seed, round));
  const std::size_t negatives = (d + 1) / 2;
  auto& w1 = params.layers.front().weights;
  std::vector<std::size_t> positions(d);
  std::vector<double> row(d);
  for (std::size_t i = 0; i < cfg.neurons; ++i) {
    std::iota(positions.begin(), positions.end(), 0);
    rng.shuffle(positions);
    for (std::size_t k = 0; k < d; ++k) {
      const double mag = std::abs(rng.normal(0.0, cfg.weight_std));
      row[positions[k]] = k < negatives ? -mag : cfg.scale_factor * mag;
    }
    w1.set_row(i, row);
  }
  params.layers.front().biases = DenseVector(cfg.neurons);
  return params;
}

std::vector<DenseVector> recover_single_activations(const GradientReport& report,
                                                    const std::vector<DenseVector>& known,
                                                    double tol, const CandidateCheck& accept,
                                                    double h_floor) {
  if (report.layers.empty()) throw ProtocolError("cah: empty gradient report");
  const auto& first = report.layers.front();
  std::vector<DenseVector> found;
  auto is_known = [&](const DenseVector& x) {
    for (const auto& k : known) {
      if (dist2(k.span(), x.span()) <= tol) return true;
    }
    for (const auto& k : found) {
      if (dist2(k.span(), x.span()) <= tol) return true;
    }
    return false;
  };
  for (std::size_t i = 0; i < first.biases.size(); ++i) {
    const double h = first.biases[i];
    if (!(std::abs(h) > h_floor)) continue;
    const auto row = first.weights.row(i);
    DenseVector x(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) x[c] = row[c] / h;
    if (!x.all_finite() || !accept(x) || is_known(x)) continue;
    found.push_back(std::move(x));
  }
  return found;
}

CandidateCheck ground_truth_check(const std::vector<DenseVector>& truth, double tol) {
  return [truth, tol](const DenseVector& x) {
    for (const auto& t : truth) {
      if (t.size() == x.size() && dist2(t.span(), x.span()) <= tol) return true;
    }
    return false;
  };
}

CahResult run_cah(const ClientConfig& client, const CahConfig& cfg, double tol) {
  cfg.validate();
  client.validate();
  const std::size_t d = client.batch.dim();
  const CandidateCheck accept = ground_truth_check(client.batch.inputs, tol);
  CahResult result;
  for (std::size_t round = 0; round < cfg.rounds; ++round) {
    const ModelParams params = craft_trap_weights(d, cfg, round);
    const ClientResponse response = client_round(client, params, round);
    const GradientReport grad = response.as_gradient();
    auto fresh = recover_single_activations(grad, result.recovered_inputs, tol, accept,
                                            1e-30 * static_cast<double>(client.batch.size()));
    for (auto& x : fresh) result.recovered_inputs.push_back(std::move(x));
    ++result.rounds_used;
  }
  return result;
}

}  // namespace hpr
