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

#include <benchmark/benchmark.h>

#include <vector>

#include "hpr/attack.hpp"
#include "hpr/data.hpp"
#include "hpr/geometry.hpp"
#include "hpr/metrics.hpp"
#include "hpr/model.hpp"

namespace {

using namespace hpr;

AttackConfig attack_config(std::size_t d, std::size_t neurons) {
  AttackConfig cfg;
  cfg.neurons = neurons;
  cfg.classes = 10;
  cfg.feature_bounds = FeatureBounds::uniform(d, -4.0, 4.0);
  cfg.rng_seed = 1;
  return cfg;
}

// Args: batch size, neurons. d = 64.
void BM_BatchGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto neurons = static_cast<std::size_t>(state.range(1));
  const auto data = gen_synthetic(Distribution::gauss, n, 64, 10, 7);
  const ModelParams p = craft_malicious_params(64, attack_config(64, neurons));
  for (auto _ : state) benchmark::DoNotOptimize(batch_gradient(p, data.batch));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_BatchGradient)->Args({64, 256})->Args({256, 256})->Args({1024, 1000});

void BM_UpdateSearchState(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  SeededRng rng(3);
  std::vector<Strip> strips;
  double level = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    if (rng.uniform() < 0.2) level += 1.0;
    strips.push_back({DenseVector(std::vector<double>(64, level)), level, rng.uniform(-10.0, 10.0)});
  }
  const StripComparison cmp{};
  for (auto _ : state) benchmark::DoNotOptimize(update_search_state(SearchState{}, strips, cmp));
}
BENCHMARK(BM_UpdateSearchState)->Arg(256)->Arg(1000)->Arg(4096);

// Args: points, dimension.
void BM_IsSeparable(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const auto data = gen_synthetic(Distribution::ball, n, d, 2, 11);
  const PointCloud cloud{data.batch.inputs};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(is_separable(cloud, i));
    i = (i + 1) % n;
  }
}
BENCHMARK(BM_IsSeparable)->Args({64, 4})->Args({256, 8})->Args({1024, 8});

void BM_Ssim(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const ImageShape shape{side, side, 3};
  SeededRng rng(5);
  std::vector<double> a(shape.size());
  std::vector<double> b(shape.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] = rng.uniform();
    b[k] = a[k] + rng.normal(0.0, 0.05);
  }
  for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b, shape));
}
BENCHMARK(BM_Ssim)->Arg(32)->Arg(224);

}  // namespace

BENCHMARK_MAIN();
