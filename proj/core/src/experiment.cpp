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

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "hpr/error.hpp"
#include "hpr/experiment.hpp"
#include "hpr/geometry.hpp"

namespace hpr {

namespace {

constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kAttackStream = 2;
constexpr std::uint64_t kClientStream = 3;

LabeledData load_source(const DatasetSpec& ds, std::uint64_t seed) {
  switch (ds.source) {
    case SourceKind::csv:
      return load_csv(ds.path, ds.label_column, ds.scaling);
    case SourceKind::tensor:
      return load_tensor(ds.path, ds.classes, seed);
    case SourceKind::synthetic:
      break;
  }
  throw InvalidInput("load_source: synthetic data is generated, not loaded");
}

}  // namespace

LabeledData build_client_data(const ExperimentConfig& cfg, const SweepCell& cell,
                              std::uint64_t seed) {
  const DatasetSpec& ds = cfg.dataset;
  const std::uint64_t data_seed = mix_seed(seed, kDataStream);
  const bool partition = ds.classes_per_client > 0 && ds.classes_per_client < ds.classes;

  LabeledData data;
  if (ds.source == SourceKind::synthetic) {
    // Oversample so the class restriction still leaves n samples.
    std::size_t pool = cell.n;
    if (partition) pool = 2 * cell.n * ds.classes / ds.classes_per_client + 64;
    data = gen_synthetic(ds.distribution, pool, ds.dim, ds.classes, data_seed);
  } else {
    data = load_source(ds, data_seed);
    for (std::size_t y : data.batch.labels) {
      if (y >= ds.classes) {
        throw ConfigError("dataset.classes: data contains label " + std::to_string(y));
      }
    }
  }
  if (partition) {
    data.batch = partition_non_iid(data.batch, ds.classes, ds.classes_per_client, data_seed);
  }
  if (data.batch.size() < cell.n) {
    throw ConfigError("sweep.n: " + std::to_string(cell.n) + " samples requested, only " +
                      std::to_string(data.batch.size()) + " available");
  }
  if (ds.source != SourceKind::synthetic || partition) {
    data.batch = subsample(data.batch, cell.n, data_seed);
  }
  return data;
}

RunRecord run_single(const ExperimentConfig& cfg, std::size_t cell_index, const SweepCell& cell,
                     std::uint64_t seed) {
  RunRecord rec;
  rec.cell = cell_index;
  rec.params = cell;
  rec.seed = seed;
  rec.method = cfg.method == Method::hyperplane ? "hyperplane" : "cah";

  const auto start = std::chrono::steady_clock::now();
  const LabeledData data = build_client_data(cfg, cell, seed);

  ClientConfig client;
  client.batch = data.batch;
  client.mode = cfg.client_mode;
  client.noise_std = cell.noise;
  client.rng_seed = mix_seed(seed, kClientStream);
  client.precision = cfg.precision;
  client.report_sample_count = cfg.report_sample_count;

  MatchOptions match;
  match.image = cfg.dataset.image;

  if (cfg.method == Method::hyperplane) {
    AttackConfig at = cfg.attack;
    at.neurons = cell.neurons;
    at.rounds = cell.rounds;
    at.classes = cfg.dataset.classes;
    at.feature_bounds = data.bounds;
    at.rng_seed = mix_seed(seed, kAttackStream);
    AttackTrace trace;
    const ReconstructionResult res = run_attack(client, at, &trace);
    rec.stats = match_reconstructions(data.batch, res.recovered_inputs, match,
                                      &res.recovered_labels);
    rec.stats.rounds_used = res.rounds_used;
    rec.collisions = res.collisions;
    rec.unrecoverable = res.unrecoverable;
    const double delta_true = min_pairwise_distance(data.batch.inputs);
    if (delta_true > 0.0 && trace.initial.length() > 0.0) {
      const double eps = epsilon_for_confidence(delta_true, cell.n, cfg.round_bound_delta);
      rec.round_bound_prediction = round_bound(trace.initial.length(), cell.neurons, cell.n, eps);
    }
  } else {
    CahConfig cah = cfg.cah;
    cah.neurons = cell.neurons;
    cah.rounds = cell.rounds;
    cah.classes = cfg.dataset.classes;
    cah.rng_seed = mix_seed(seed, kAttackStream);
    const double tol = cell.noise > 0.0 ? match.l2_threshold : 1e-6;
    const CahResult res = run_cah(client, cah, tol);
    rec.stats = match_reconstructions(data.batch, res.recovered_inputs, match);
    rec.stats.rounds_used = res.rounds_used;
  }

  if (cfg.hull_stats) rec.hull_vertex_count = hull_vertex_count(PointCloud{data.batch.inputs});
  if (cfg.timing) {
    rec.stats.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, std::size_t workers) {
  const auto cells = cfg.cells();
  struct Task {
    std::size_t cell;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::uint64_t s : cfg.seeds) tasks.push_back({c, s});
  }

  std::vector<RunRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      try {
        records[i] = run_single(cfg, t.cell, cells[t.cell], t.seed);
      } catch (const std::exception& e) {
        RunRecord failed;
        failed.cell = t.cell;
        failed.params = cells[t.cell];
        failed.seed = t.seed;
        failed.method = cfg.method == Method::hyperplane ? "hyperplane" : "cah";
        failed.error = e.what();
        records[i] = std::move(failed);
      }
    }
  };
  const std::size_t count = std::max<std::size_t>(1, std::min(workers, tasks.size()));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < count; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  ExperimentReport report;
  report.config = cfg.echo;
  report.records = std::move(records);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellAggregate agg;
    agg.cell = c;
    agg.params = cells[c];
    std::vector<double> fractions;
    for (const auto& r : report.records) {
      if (r.cell == c && !r.error) fractions.push_back(r.stats.fraction);
    }
    agg.runs = fractions.size();
    agg.fraction = mean_std(fractions);
    report.aggregates.push_back(agg);
  }
  return report;
}

std::size_t workers_from_env() {
  const char* env = std::getenv("HPR_WORKERS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0' || v == 0) {
    throw ConfigError("HPR_WORKERS must be a positive integer, got '" + std::string(env) + "'");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace hpr
