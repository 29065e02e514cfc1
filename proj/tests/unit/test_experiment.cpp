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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hpr/error.hpp"
#include "hpr/experiment.hpp"

namespace hpr {
namespace {

ExperimentConfig small_config(const std::vector<std::string>& extra = {}) {
  std::vector<std::string> sets = {"dataset.dim=8", "sweep.n=16", "sweep.neurons=32",
                                   "sweep.rounds=10", "seeds=0,1,2"};
  sets.insert(sets.end(), extra.begin(), extra.end());
  return config_from_key_values(apply_overrides({}, sets));
}

TEST(KeyValues, ParsesCommentsAndWhitespace) {
  const auto kv = parse_key_values("# header\n a = 1 \n\nb=x y # trailing\n");
  EXPECT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv.at("a"), "1");
  EXPECT_EQ(kv.at("b"), "x y");
  EXPECT_THROW(parse_key_values("novalue\n"), ConfigError);
  EXPECT_THROW(apply_overrides({}, {"broken"}), ConfigError);
  EXPECT_THROW(read_key_values("/nonexistent/file.cfg"), IoError);
}

TEST(Config, DefaultsAndCellOrder) {
  const auto cfg = config_from_key_values(
      apply_overrides({}, {"sweep.n=1,2", "sweep.neurons=5,6", "sweep.noise=0,0.1"}));
  const auto cells = cfg.cells();
  ASSERT_EQ(cells.size(), 8u);
  EXPECT_EQ(cells[0].n, 1u);
  EXPECT_EQ(cells[0].neurons, 5u);
  EXPECT_EQ(cells[1].noise, 0.1);
  EXPECT_EQ(cells[2].neurons, 6u);
  EXPECT_EQ(cells[4].n, 2u);
  EXPECT_EQ(cfg.echo.at("attack.classifier_bias"), "1e25");
  EXPECT_EQ(cfg.dataset.dim, 64u);
}

TEST(Config, InvalidFieldsAreAllListed) {
  try {
    config_from_key_values(apply_overrides(
        {}, {"sweep.n=abc", "method=magic", "attack.bogus=1", "client.mode=local_steps",
             "client.minibatch=0"}));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("sweep.n"), std::string::npos) << msg;
    EXPECT_NE(msg.find("method"), std::string::npos) << msg;
    EXPECT_NE(msg.find("attack.bogus"), std::string::npos) << msg;
    EXPECT_NE(msg.find("client.minibatch"), std::string::npos) << msg;
  }
  EXPECT_THROW(small_config({"client.mode=local_steps", "client.local_steps=5",
                             "client.minibatch=8"}),
               ConfigError);
  EXPECT_THROW(small_config({"seeds="}), ConfigError);
}

TEST(Config, ImageShapeParses) {
  const auto cfg = config_from_key_values(apply_overrides({}, {"dataset.image=4x5x3"}));
  ASSERT_TRUE(cfg.dataset.image.has_value());
  EXPECT_EQ(cfg.dataset.image->size(), 60u);
  EXPECT_THROW(config_from_key_values(apply_overrides({}, {"dataset.image=4x5"})), ConfigError);
}

TEST(Experiment, OneCellThreeSeeds) {
  const auto report = run_experiment(small_config());
  ASSERT_EQ(report.records.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(report.records[k].seed, k);
    EXPECT_FALSE(report.records[k].error.has_value());
    EXPECT_EQ(report.records[k].stats.n_true, 16u);
    EXPECT_EQ(report.records[k].stats.fraction, 1.0);
    EXPECT_TRUE(report.records[k].round_bound_prediction.has_value());
  }
  ASSERT_EQ(report.aggregates.size(), 1u);
  EXPECT_EQ(report.aggregates[0].runs, 3u);
  EXPECT_EQ(report.aggregates[0].fraction.mean, 1.0);
}

TEST(Experiment, DeterministicAcrossWorkerCounts) {
  const auto cfg = small_config({"sweep.n=8,16"});
  const auto a = report_to_csv(run_experiment(cfg, 1));
  const auto b = report_to_csv(run_experiment(cfg, 4));
  EXPECT_EQ(a, b);
}

TEST(Experiment, CahMethodRuns) {
  const auto report = run_experiment(small_config({"method=cah", "seeds=0"}));
  ASSERT_EQ(report.records.size(), 1u);
  EXPECT_EQ(report.records[0].method, "cah");
  EXPECT_FALSE(report.records[0].error.has_value());
  EXPECT_LE(report.records[0].stats.fraction, 1.0);
}

TEST(Experiment, FailingRunIsRecorded) {
  // The config check rejects this up front; bypass it to exercise run isolation.
  ExperimentConfig cfg = small_config();
  cfg.client_mode = LocalSteps{5, 8, 1e-4};
  const auto report = run_experiment(cfg);
  ASSERT_EQ(report.records.size(), 3u);
  for (const auto& r : report.records) EXPECT_TRUE(r.error.has_value());
}

TEST(Experiment, HullStatsAndDataDeterminism) {
  const auto cfg = small_config({"report.hull_stats=true", "seeds=4"});
  const auto report = run_experiment(cfg);
  ASSERT_TRUE(report.records[0].hull_vertex_count.has_value());
  EXPECT_LE(*report.records[0].hull_vertex_count, 16u);
  const SweepCell cell = cfg.cells()[0];
  EXPECT_EQ(build_client_data(cfg, cell, 4).batch.inputs,
            build_client_data(cfg, cell, 4).batch.inputs);
  EXPECT_NE(build_client_data(cfg, cell, 4).batch.inputs,
            build_client_data(cfg, cell, 5).batch.inputs);
}

TEST(Report, EmptySweepGivesHeaderOnlyCsv) {
  ExperimentConfig cfg = small_config();
  cfg.seeds.clear();
  const auto report = run_experiment(cfg);
  EXPECT_TRUE(report.records.empty());
  const std::string csv = report_to_csv(report);
  std::string header;
  for (std::size_t k = 0; k < report_csv_header().size(); ++k) {
    header += (k ? "," : "") + report_csv_header()[k];
  }
  EXPECT_EQ(csv, header + "\n");
  EXPECT_TRUE(records_from_csv(csv).empty());
}

TEST(Report, JsonRoundTripPreservesCsv) {
  const auto report = run_experiment(small_config({"seeds=0,1", "report.hull_stats=true"}));
  const auto back = report_from_json(nlohmann::json::parse(report_to_json(report).dump()));
  EXPECT_EQ(report_to_csv(back), report_to_csv(report));
  EXPECT_EQ(back.config, report.config);
  ASSERT_EQ(back.aggregates.size(), report.aggregates.size());
  EXPECT_EQ(back.aggregates[0].fraction.mean, report.aggregates[0].fraction.mean);
}

TEST(Report, CsvRecordsRoundTrip) {
  const auto report = run_experiment(small_config({"seeds=0,1"}));
  const auto records = records_from_csv(report_to_csv(report));
  ASSERT_EQ(records.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(records[k].seed, report.records[k].seed);
    EXPECT_EQ(records[k].stats.fraction, report.records[k].stats.fraction);
    EXPECT_EQ(records[k].stats.rounds_used, report.records[k].stats.rounds_used);
    EXPECT_EQ(records[k].round_bound_prediction, report.records[k].round_bound_prediction);
  }
}

TEST(Report, EmitWritesFileAndRejectsBadPath) {
  const auto report = run_experiment(small_config({"seeds=0"}));
  const auto path = std::filesystem::temp_directory_path() / "hpr_emit_test.json";
  emit_report(report, ReportFormat::json, path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(nlohmann::json::parse(ss.str())["records"].size(), 1u);
  std::filesystem::remove(path);
  EXPECT_THROW(emit_report(report, ReportFormat::csv, "/nonexistent/dir/out.csv"), IoError);
}

}  // namespace
}  // namespace hpr
