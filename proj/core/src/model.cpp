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

#include "hpr/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hpr/error.hpp"

namespace hpr {

void ModelParams::validate() const {
  if (layers.size() < 2) throw InvalidInput("ModelParams: need at least two layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.biases.size() != layer.weights.rows()) {
      throw InvalidInput("ModelParams: layer " + std::to_string(l) + " bias length mismatch");
    }
    if (l > 0 && layer.weights.cols() != layers[l - 1].weights.rows()) {
      throw InvalidInput("ModelParams: layer " + std::to_string(l) +
                         " input width does not match previous layer output");
    }
  }
  if (layers.back().weights.rows() != class_count) {
    throw InvalidInput("ModelParams: output width != class_count");
  }
}

void Batch::validate(std::size_t classes) const {
  if (inputs.empty()) throw InvalidInput("Batch: empty");
  if (inputs.size() != labels.size()) throw InvalidInput("Batch: inputs/labels size mismatch");
  const std::size_t d = inputs.front().size();
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    if (inputs[j].size() != d) throw InvalidInput("Batch: ragged inputs");
    if (labels[j] >= classes) {
      throw InvalidInput("Batch: label " + std::to_string(labels[j]) + " out of range");
    }
  }
}

ForwardPass forward(const ModelParams& params, const DenseVector& x) {
  if (x.size() != params.input_dim()) throw InvalidInput("forward: input dimension mismatch");
  ForwardPass pass;
  const DenseVector* in = &x;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    DenseVector z = matvec(layer.weights, *in);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += layer.biases[i];
    DenseVector a = z;
    if (l + 1 < params.layers.size()) {
      for (double& v : a) v = v > 0.0 ? v : 0.0;
    }
    pass.linear.push_back(std::move(z));
    pass.activations.push_back(std::move(a));
    in = &pass.activations.back();
  }
  pass.probs = stable_softmax(pass.activations.back());
  return pass;
}

namespace {

// log-sum-exp form keeps the loss finite when one probability underflows.
double cross_entropy(const DenseVector& logits, std::size_t label) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double z : logits) total += std::exp(z - top);
  return std::log(total) - (logits[label] - top);
}

template <typename S>
struct LayerBuf {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<S> w;
  std::vector<S> b;
};

template <typename S>
GradientReport gradient_kernel(const ModelParams& params, const Batch& batch) {
  const std::size_t depth = params.layers.size();
  std::vector<LayerBuf<S>> net(depth);
  std::vector<LayerBuf<S>> grad(depth);
  for (std::size_t l = 0; l < depth; ++l) {
    const auto& src = params.layers[l];
    auto& dst = net[l];
    dst.rows = src.weights.rows();
    dst.cols = src.weights.cols();
    dst.w.assign(src.weights.data().begin(), src.weights.data().end());
    dst.b.assign(src.biases.begin(), src.biases.end());
    grad[l].rows = dst.rows;
    grad[l].cols = dst.cols;
    grad[l].w.assign(dst.w.size(), S(0));
    grad[l].b.assign(dst.b.size(), S(0));
  }

  std::vector<std::vector<S>> act(depth);
  for (std::size_t l = 0; l < depth; ++l) act[l].resize(net[l].rows);
  std::vector<S> x(params.input_dim());
  std::vector<S> delta;
  std::vector<S> prev;
  double loss_total = 0.0;

  for (std::size_t j = 0; j < batch.size(); ++j) {
    std::copy(batch.inputs[j].begin(), batch.inputs[j].end(), x.begin());
    for (std::size_t l = 0; l < depth; ++l) {
      const auto& layer = net[l];
      const std::vector<S>& in = l == 0 ? x : act[l - 1];
      for (std::size_t r = 0; r < layer.rows; ++r) {
        const S* row = layer.w.data() + r * layer.cols;
        S acc = S(0);
        for (std::size_t c = 0; c < layer.cols; ++c) acc += row[c] * in[c];
        acc += layer.b[r];
        act[l][r] = (l + 1 < depth && !(acc > S(0))) ? S(0) : acc;
      }
    }

    const auto& logits = act[depth - 1];
    const S top = *std::max_element(logits.begin(), logits.end());
    delta.assign(logits.size(), S(0));
    S total = S(0);
    for (std::size_t k = 0; k < logits.size(); ++k) {
      delta[k] = std::exp(logits[k] - top);
      total += delta[k];
    }
    for (S& p : delta) p /= total;
    const std::size_t y = batch.labels[j];
    loss_total += static_cast<double>(std::log(total) - (logits[y] - top));
    delta[y] -= S(1);

    for (std::size_t l = depth; l-- > 0;) {
      const auto& layer = net[l];
      auto& g = grad[l];
      const std::vector<S>& in = l == 0 ? x : act[l - 1];
      for (std::size_t r = 0; r < layer.rows; ++r) {
        const S dr = delta[r];
        if (dr == S(0)) continue;
        g.b[r] += dr;
        S* grow = g.w.data() + r * layer.cols;
        for (std::size_t c = 0; c < layer.cols; ++c) grow[c] += dr * in[c];
      }
      if (l == 0) break;
      prev.assign(layer.cols, S(0));
      for (std::size_t r = 0; r < layer.rows; ++r) {
        const S dr = delta[r];
        if (dr == S(0)) continue;
        const S* row = layer.w.data() + r * layer.cols;
        for (std::size_t c = 0; c < layer.cols; ++c) prev[c] += row[c] * dr;
      }
      const auto& gate = act[l - 1];
      for (std::size_t c = 0; c < layer.cols; ++c) {
        if (!(gate[c] > S(0))) prev[c] = S(0);
      }
      delta.swap(prev);
    }
  }

  const S n = static_cast<S>(batch.size());
  GradientReport report;
  report.loss = loss_total / static_cast<double>(batch.size());
  report.layers.resize(depth);
  for (std::size_t l = 0; l < depth; ++l) {
    auto& out = report.layers[l];
    out.weights = DenseMatrix(grad[l].rows, grad[l].cols);
    out.biases = DenseVector(grad[l].rows);
    auto w = out.weights.data();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(grad[l].w[i] / n);
    for (std::size_t i = 0; i < grad[l].rows; ++i) {
      out.biases[i] = static_cast<double>(grad[l].b[i] / n);
    }
  }
  return report;
}

}  // namespace

double mean_loss(const ModelParams& params, const Batch& batch) {
  params.validate();
  batch.validate(params.class_count);
  double total = 0.0;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const auto pass = forward(params, batch.inputs[j]);
    total += cross_entropy(pass.activations.back(), batch.labels[j]);
  }
  return total / static_cast<double>(batch.size());
}

GradientReport batch_gradient(const ModelParams& params, const Batch& batch,
                              Precision precision) {
  params.validate();
  batch.validate(params.class_count);
  if (batch.dim() != params.input_dim()) {
    throw InvalidInput("batch_gradient: input dimension mismatch");
  }
  return precision == Precision::f32 ? gradient_kernel<float>(params, batch)
                                     : gradient_kernel<double>(params, batch);
}

double per_sample_bias_grad(const ModelParams& params, const DenseVector& x,
                            std::size_t label, std::size_t neuron) {
  if (neuron >= params.attack_width()) throw InvalidInput("per_sample_bias_grad: bad neuron");
  if (label >= params.class_count) throw InvalidInput("per_sample_bias_grad: bad label");
  const auto pass = forward(params, x);
  if (!(pass.linear[0][neuron] > 0.0)) return 0.0;

  // gamma_k = softmax_k - [k == y], pushed back through W^(L) ... W^(2)
  // with the ReLU gates of the hidden layers; only the attack-layer entry
  // for `neuron` is kept at the end.
  const std::size_t depth = params.layers.size();
  std::vector<double> upstream(pass.probs.begin(), pass.probs.end());
  upstream[label] -= 1.0;
  for (std::size_t l = depth - 1; l >= 2; --l) {
    const auto& w = params.layers[l].weights;
    std::vector<double> below(w.cols(), 0.0);
    for (std::size_t m = 0; m < w.cols(); ++m) {
      if (!(pass.linear[l - 1][m] > 0.0)) continue;
      double acc = 0.0;
      for (std::size_t k = 0; k < w.rows(); ++k) acc += upstream[k] * w(k, m);
      below[m] = acc;
    }
    upstream.swap(below);
  }
  const auto& w2 = params.layers[1].weights;
  double acc = 0.0;
  for (std::size_t k = 0; k < w2.rows(); ++k) acc += upstream[k] * w2(k, neuron);
  return acc;
}

GradientReport zero_gradient(const ModelParams& params) {
  GradientReport report;
  for (const auto& layer : params.layers) {
    report.layers.push_back(
        {DenseMatrix(layer.weights.rows(), layer.weights.cols()), DenseVector(layer.biases.size())});
  }
  return report;
}

}  // namespace hpr
