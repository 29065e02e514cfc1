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

// hpr: command-line driver for reconstruction experiments.
//
//   hpr run <config> [--set key=value ...] [--output PATH] [--format json|csv]
//   hpr validate <config> [--set key=value ...]
//   hpr gen-data <spec> <out>      spec: dist=gauss,n=256,d=64,classes=10,seed=0
//   hpr hull-stats <tensor>
//
// Exit status: 0 ok, 1 config error, 2 I/O or format error.

#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hpr/data.hpp"
#include "hpr/error.hpp"
#include "hpr/experiment.hpp"
#include "hpr/geometry.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

hpr::ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& sets) {
  return hpr::config_from_key_values(hpr::apply_overrides(hpr::read_key_values(path), sets));
}

int cmd_run(const std::string& path, const std::vector<std::string>& sets,
            const std::string& output, const std::string& format) {
  std::vector<std::string> all = sets;
  if (!output.empty()) all.push_back("output.path=" + output);
  if (!format.empty()) all.push_back("output.format=" + format);
  const hpr::ExperimentConfig cfg = load_config(path, all);
  const hpr::ExperimentReport report = hpr::run_experiment(cfg, hpr::workers_from_env());

  for (const auto& r : report.records) {
    std::cerr << "cell " << r.cell << " n=" << r.params.n << " N=" << r.params.neurons
              << " T=" << r.params.rounds << " sigma=" << r.params.noise << " seed=" << r.seed;
    if (r.error) {
      std::cerr << " error: " << *r.error << "\n";
      continue;
    }
    std::cerr << " fraction=" << r.stats.fraction << " rounds_used=" << r.stats.rounds_used;
    if (r.round_bound_prediction) std::cerr << " round_bound=" << *r.round_bound_prediction;
    std::cerr << "\n";
  }

  if (cfg.output_path.empty()) {
    if (cfg.format == hpr::ReportFormat::json) {
      std::cout << hpr::report_to_json(report).dump(2) << "\n";
    } else {
      std::cout << hpr::report_to_csv(report);
    }
  } else {
    hpr::emit_report(report, cfg.format, cfg.output_path);
  }
  return kExitOk;
}

int cmd_validate(const std::string& path, const std::vector<std::string>& sets) {
  const hpr::ExperimentConfig cfg = load_config(path, sets);
  std::cout << "ok: " << cfg.cells().size() << " cells x " << cfg.seeds.size() << " seeds\n";
  return kExitOk;
}

int cmd_gen_data(const std::string& spec, const std::string& out) {
  hpr::KeyValues kv = {{"dist", "gauss"}, {"n", "256"}, {"d", "64"}, {"classes", "10"},
                       {"seed", "0"}};
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw hpr::ConfigError("gen-data: '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    if (!kv.count(key)) throw hpr::ConfigError("gen-data: unknown key '" + key + "'");
    kv[key] = item.substr(eq + 1);
  }
  std::size_t n = 0, d = 0, classes = 0;
  std::uint64_t seed = 0;
  try {
    n = std::stoull(kv["n"]);
    d = std::stoull(kv["d"]);
    classes = std::stoull(kv["classes"]);
    seed = std::stoull(kv["seed"]);
  } catch (const std::logic_error&) {
    throw hpr::ConfigError("gen-data: n, d, classes and seed must be integers");
  }
  const auto data = hpr::gen_synthetic(hpr::parse_distribution(kv["dist"]), n, d, classes, seed);
  const bool csv = out.size() >= 4 && out.compare(out.size() - 4, 4, ".csv") == 0;
  if (csv) {
    hpr::save_csv(out, data.batch);
  } else {
    hpr::save_tensor(out, data.batch.inputs);
  }
  std::cout << "wrote " << n << " x " << d << " samples to " << out << "\n";
  return kExitOk;
}

int cmd_hull_stats(const std::string& path) {
  const auto data = hpr::load_tensor(path);
  const hpr::PointCloud cloud{data.batch.inputs};
  const std::size_t vertices = hpr::hull_vertex_count(cloud);
  nlohmann::json out = {{"n", cloud.size()},
                        {"d", cloud.dim()},
                        {"hull_vertices", vertices},
                        {"fraction", static_cast<double>(vertices) /
                                         static_cast<double>(cloud.size())}};
  if (cloud.size() >= 2) {
    const double n = static_cast<double>(cloud.size());
    for (auto dist : {hpr::Distribution::ball, hpr::Distribution::cube, hpr::Distribution::gauss}) {
      out["order_" + hpr::to_string(dist)] = hpr::theoretical_order(dist, n, cloud.dim());
    }
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperplane reconstruction experiments"};
  app.require_subcommand(1);

  std::string config_path, output, format, spec, out_path, tensor_path;
  std::vector<std::string> sets;

  auto* run = app.add_subcommand("run", "Run an experiment sweep");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--set", sets, "Override a config key (key=value)");
  run->add_option("--output", output, "Report path (overrides output.path)");
  run->add_option("--format", format, "json or csv (overrides output.format)");

  auto* validate = app.add_subcommand("validate", "Check a config file");
  validate->add_option("config", config_path, "Config file")->required();
  validate->add_option("--set", sets, "Override a config key (key=value)");

  auto* gen = app.add_subcommand("gen-data", "Write a synthetic batch");
  gen->add_option("spec", spec, "dist=..,n=..,d=..,classes=..,seed=..")->required();
  gen->add_option("out", out_path, "Output path (.csv or raw tensor)")->required();

  auto* hull = app.add_subcommand("hull-stats", "Count convex-hull vertices of a tensor file");
  hull->add_option("tensor", tensor_path, "Raw tensor file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, sets, output, format);
    if (*validate) return cmd_validate(config_path, sets);
    if (*gen) return cmd_gen_data(spec, out_path);
    if (*hull) return cmd_hull_stats(tensor_path);
  } catch (const hpr::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const hpr::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const hpr::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const hpr::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
