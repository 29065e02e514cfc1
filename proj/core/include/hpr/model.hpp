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
#include <vector>

#include "hpr/numerics.hpp"

namespace hpr {

/// Arithmetic used by the client when differentiating the model.
enum class Precision { f64, f32 };

struct Layer {
  DenseMatrix weights;  // out x in
  DenseVector biases;   // out

  friend bool operator==(const Layer&, const Layer&) = default;
};

/// Fully connected ReLU network. Every layer but the last applies ReLU; the
/// last produces logits fed to softmax cross-entropy. layers[0] is the attack
/// layer (N x d).
struct ModelParams {
  std::vector<Layer> layers;
  std::size_t class_count = 0;

  std::size_t input_dim() const { return layers.front().weights.cols(); }
  std::size_t attack_width() const { return layers.front().weights.rows(); }

  /// Throws InvalidInput if layer shapes do not chain or the output width
  /// differs from class_count.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct Batch {
  std::vector<DenseVector> inputs;
  std::vector<std::size_t> labels;

  std::size_t size() const { return inputs.size(); }
  std::size_t dim() const { return inputs.empty() ? 0 : inputs.front().size(); }

  /// Throws InvalidInput if empty, ragged, or labels are out of [0, classes).
  void validate(std::size_t classes) const;
};

struct LayerGradient {
  DenseMatrix weights;
  DenseVector biases;
};

/// Gradient of the mean loss over a batch; shapes mirror ModelParams.
struct GradientReport {
  std::vector<LayerGradient> layers;
  double loss = 0.0;
};

struct ForwardPass {
  std::vector<DenseVector> linear;       // W a + b for each layer
  std::vector<DenseVector> activations;  // ReLU(linear) on hidden layers, logits on the last
  DenseVector probs;
};

ForwardPass forward(const ModelParams& params, const DenseVector& x);

/// Mean cross-entropy of the batch, direct forward evaluation.
double mean_loss(const ModelParams& params, const Batch& batch);

/// Backpropagated gradient of the mean cross-entropy. Per-sample
/// contributions are reduced in index order, so the result does not depend
/// on how the work is scheduled.
GradientReport batch_gradient(const ModelParams& params, const Batch& batch,
                              Precision precision = Precision::f64);

/// Closed-form dL_j / d b^(1)_neuron for a single sample; exactly 0 when the
/// sample does not activate the neuron.
double per_sample_bias_grad(const ModelParams& params, const DenseVector& x,
                            std::size_t label, std::size_t neuron);

/// Zero report with the same shapes as params.
GradientReport zero_gradient(const ModelParams& params);

}  // namespace hpr
