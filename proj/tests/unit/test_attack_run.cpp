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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "hpr/attack.hpp"
#include "hpr/error.hpp"

namespace hpr {
namespace {

struct Scenario {
  ClientConfig client;
  AttackConfig attack;
};

Scenario make_setup(std::size_t n, std::size_t neurons, std::size_t rounds, std::uint64_t seed) {
  const auto data = gen_synthetic(Distribution::gauss, n, 8, 10, seed);
  Scenario s;
  s.client.batch = data.batch;
  s.client.rng_seed = seed;
  s.attack.neurons = neurons;
  s.attack.classes = 10;
  s.attack.rounds = rounds;
  s.attack.feature_bounds = data.bounds;
  s.attack.rng_seed = seed + 1000;
  return s;
}

// Worst distance from each true input to its nearest recovered one, and
// whether that nearest recovery carries the right label.
std::pair<double, std::size_t> score(const Batch& truth, const ReconstructionResult& r) {
  double worst = 0.0;
  std::size_t labels = 0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t k = 0; k < r.recovered_inputs.size(); ++k) {
      const double e = dist2(truth.inputs[j].span(), r.recovered_inputs[k].span());
      if (e < best) {
        best = e;
        arg = k;
      }
    }
    worst = std::max(worst, best);
    if (!r.recovered_inputs.empty() && r.recovered_labels[arg] == truth.labels[j]) ++labels;
  }
  return {worst, labels};
}

TEST(RunAttack, SingleInputOneRound) {
  const Scenario s = make_setup(1, 4, 1, 3);
  const auto r = run_attack(s.client, s.attack);
  ASSERT_EQ(r.recovered_inputs.size(), 1u);
  EXPECT_EQ(r.rounds_used, 1u);
  const auto [err, labels] = score(s.client.batch, r);
  EXPECT_LT(err, 1e-9);
  EXPECT_EQ(labels, 1u);
}

TEST(RunAttack, RecoversWholeBatch) {
  const Scenario s = make_setup(32, 64, 30, 5);
  AttackTrace trace;
  const auto r = run_attack(s.client, s.attack, &trace);
  EXPECT_EQ(r.recovered_inputs.size(), 32u);
  const auto [err, labels] = score(s.client.batch, r);
  EXPECT_LT(err, 1e-6);
  EXPECT_EQ(labels, 32u);
  ASSERT_TRUE(trace.isolation_round.has_value());
  EXPECT_EQ(*trace.isolation_round, r.rounds_used);
  EXPECT_EQ(trace.live_intervals.size(), r.rounds_used);
  EXPECT_EQ(trace.direction.size(), 8u);
  EXPECT_LT(trace.initial.low, trace.initial.high);
}

TEST(RunAttack, WorksWithoutReportedSampleCount) {
  Scenario s = make_setup(16, 64, 30, 7);
  s.client.report_sample_count = false;
  const auto r = run_attack(s.client, s.attack);
  EXPECT_EQ(r.recovered_inputs.size(), 16u);
  EXPECT_LT(score(s.client.batch, r).first, 1e-6);
}

TEST(RunAttack, Deterministic) {
  const Scenario s = make_setup(16, 32, 10, 9);
  const auto a = run_attack(s.client, s.attack);
  const auto b = run_attack(s.client, s.attack);
  EXPECT_EQ(a.recovered_inputs, b.recovered_inputs);
  EXPECT_EQ(a.rounds_used, b.rounds_used);
}

TEST(RunAttack, MoreRoundsNeverHurt) {
  std::size_t prev = 0;
  for (std::size_t rounds : {1u, 2u, 4u, 8u}) {
    const Scenario s = make_setup(64, 16, rounds, 11);
    const auto r = run_attack(s.client, s.attack);
    std::size_t good = 0;
    for (const auto& x : s.client.batch.inputs) {
      for (const auto& y : r.recovered_inputs) {
        if (dist2(x.span(), y.span()) < 1e-6) {
          ++good;
          break;
        }
      }
    }
    EXPECT_GE(good, prev);
    prev = good;
  }
  EXPECT_GT(prev, 0u);
}

TEST(RunAttack, HiddenLayersStillRecoverInputs) {
  Scenario s = make_setup(8, 32, 20, 13);
  s.attack.hidden_layers = 1;
  s.attack.hidden_width = 50;
  const auto r = run_attack(s.client, s.attack);
  EXPECT_LT(score(s.client.batch, r).first, 1e-6);
}

TEST(RunAttack, MismatchedBoundsRejected) {
  Scenario s = make_setup(4, 8, 2, 1);
  s.attack.feature_bounds = FeatureBounds::uniform(3, -1.0, 1.0);
  EXPECT_THROW(run_attack(s.client, s.attack), ConfigError);
}

}  // namespace
}  // namespace hpr
