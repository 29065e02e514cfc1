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

// Config-driven experiment harness: data -> federation -> attack or baseline
// -> metrics, over a sweep grid and a list of seeds.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hpr/attack.hpp"
#include "hpr/cah.hpp"
#include "hpr/data.hpp"
#include "hpr/federation.hpp"
#include "hpr/metrics.hpp"

namespace hpr {

/// Flat `key = value` document. '#' starts a comment; blank lines ignored.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
KeyValues read_key_values(const std::filesystem::path& path);

enum class SourceKind { synthetic, csv, tensor };
enum class Method { hyperplane, cah };
enum class ReportFormat { json, csv };

struct DatasetSpec {
  SourceKind source = SourceKind::synthetic;
  Distribution distribution = Distribution::gauss;
  std::size_t dim = 64;
  std::size_t classes = 10;
  std::filesystem::path path;
  std::string label_column = "label";
  Scaling scaling = Scaling::minus1to1;
  /// 0 keeps the data IID; otherwise each client keeps this many classes.
  std::size_t classes_per_client = 0;
  std::optional<ImageShape> image;
};

struct SweepCell {
  std::size_t n = 0;
  std::size_t neurons = 0;
  std::size_t rounds = 0;
  double noise = 0.0;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  Method method = Method::hyperplane;
  AttackConfig attack;  // neurons, rounds and seed are set per run
  CahConfig cah;
  ClientMode client_mode = FullBatch{};
  Precision precision = Precision::f64;
  bool report_sample_count = true;

  std::vector<std::size_t> sweep_n{256};
  std::vector<std::size_t> sweep_neurons{256};
  std::vector<std::size_t> sweep_rounds{10};
  std::vector<double> sweep_noise{0.0};
  std::vector<std::uint64_t> seeds{0};

  std::filesystem::path output_path;
  ReportFormat format = ReportFormat::json;
  bool hull_stats = false;
  bool timing = false;
  double round_bound_delta = 0.01;

  /// Canonical echo of every recognised key, defaults included.
  KeyValues echo;

  /// Cells in declared order: n outermost, then neurons, rounds, noise.
  std::vector<SweepCell> cells() const;
};

/// Builds and validates a config. Unknown keys and invalid values are all
/// collected into one ConfigError, one offending field per line.
ExperimentConfig config_from_key_values(const KeyValues& kv);

/// Applies `key=value` overrides on top of the file contents.
KeyValues apply_overrides(KeyValues base, const std::vector<std::string>& overrides);

struct RunRecord {
  std::size_t cell = 0;
  SweepCell params;
  std::uint64_t seed = 0;
  std::string method;
  RecoveryStats stats;
  std::size_t collisions = 0;
  std::size_t unrecoverable = 0;
  std::optional<std::size_t> round_bound_prediction;
  std::optional<std::size_t> hull_vertex_count;
  std::optional<std::string> error;
};

struct CellAggregate {
  std::size_t cell = 0;
  SweepCell params;
  std::size_t runs = 0;
  MeanStd fraction;
};

struct ExperimentReport {
  KeyValues config;
  std::vector<RunRecord> records;
  std::vector<CellAggregate> aggregates;
};

/// Data batch for one run, deterministic in (config, cell, seed).
LabeledData build_client_data(const ExperimentConfig& cfg, const SweepCell& cell,
                              std::uint64_t seed);

RunRecord run_single(const ExperimentConfig& cfg, std::size_t cell_index, const SweepCell& cell,
                     std::uint64_t seed);

/// Every cell x seed; up to `workers` runs at a time, merged in sweep order.
/// A failing run is recorded with its error and does not stop the others.
ExperimentReport run_experiment(const ExperimentConfig& cfg, std::size_t workers = 1);

/// Worker count from HPR_WORKERS, defaulting to 1.
std::size_t workers_from_env();

/// Stable CSV column order.
const std::vector<std::string>& report_csv_header();

nlohmann::json report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& doc);
std::string report_to_csv(const ExperimentReport& report);
/// Records only; aggregates and config are not part of the CSV contract.
std::vector<RunRecord> records_from_csv(const std::string& text);

/// Writes the report; throws IoError when the path is unwritable.
void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::filesystem::path& path);

}  // namespace hpr
