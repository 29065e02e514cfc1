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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hpr/error.hpp"
#include "hpr/experiment.hpp"

namespace hpr {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const KeyValues& defaults() {
  static const KeyValues d = {
      {"attack.classifier_bias", "1e25"},
      {"attack.epsilon", "0"},
      {"attack.g_equal_tol", "1e-9"},
      {"attack.hidden_layers", "0"},
      {"attack.hidden_width", "100"},
      {"attack.residual_tol", "1e-4"},
      {"attack.weight_mode", "standard"},
      {"cah.scale_factor", "0.99"},
      {"cah.weight_std", "0.7071067811865476"},
      {"client.learning_rate", "1e-4"},
      {"client.local_steps", "1"},
      {"client.minibatch", "1"},
      {"client.mode", "full_batch"},
      {"client.precision", "f64"},
      {"client.report_sample_count", "true"},
      {"dataset.classes", "10"},
      {"dataset.classes_per_client", "0"},
      {"dataset.dim", "64"},
      {"dataset.distribution", "gauss"},
      {"dataset.image", ""},
      {"dataset.label_column", "label"},
      {"dataset.path", ""},
      {"dataset.scaling", "minus1to1"},
      {"dataset.source", "synthetic"},
      {"method", "hyperplane"},
      {"output.format", "json"},
      {"output.path", ""},
      {"report.hull_stats", "false"},
      {"report.round_bound_delta", "0.01"},
      {"report.timing", "false"},
      {"seeds", "0"},
      {"sweep.n", "256"},
      {"sweep.neurons", "256"},
      {"sweep.noise", "0"},
      {"sweep.rounds", "10"},
  };
  return d;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

class Reader {
 public:
  explicit Reader(const KeyValues& kv) : kv_(kv) {}

  const std::string& raw(const std::string& key) const { return kv_.at(key); }

  std::size_t count(const std::string& key, std::size_t min = 0) {
    try {
      const std::string& t = raw(key);
      std::size_t used = 0;
      if (t.empty() || t[0] == '-') throw std::invalid_argument("negative");
      const unsigned long long v = std::stoull(t, &used);
      if (used != t.size()) throw std::invalid_argument("trailing");
      if (v < min) {
        fail(key, "must be >= " + std::to_string(min));
        return min;
      }
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      fail(key, "expected a non-negative integer, got '" + raw(key) + "'");
      return min;
    }
  }

  double real(const std::string& key) {
    try {
      const std::string& t = raw(key);
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size() || !std::isfinite(v)) throw std::invalid_argument("bad");
      return v;
    } catch (const std::exception&) {
      fail(key, "expected a finite number, got '" + raw(key) + "'");
      return 0.0;
    }
  }

  bool flag(const std::string& key) {
    const std::string& t = raw(key);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    fail(key, "expected true or false, got '" + t + "'");
    return false;
  }

  template <typename T, typename Parse>
  std::vector<T> list(const std::string& key, Parse parse) {
    std::vector<T> out;
    for (const auto& item : split_list(raw(key))) {
      try {
        out.push_back(parse(item));
      } catch (const std::exception&) {
        fail(key, "bad list entry '" + item + "'");
      }
    }
    if (out.empty()) fail(key, "list is empty");
    return out;
  }

  template <typename F>
  auto choice(const std::string& key, F parse) -> decltype(parse(std::string{})) {
    try {
      return parse(raw(key));
    } catch (const std::exception& e) {
      fail(key, e.what());
      return decltype(parse(std::string{})){};
    }
  }

  void fail(const std::string& key, const std::string& why) { errors_.push_back(key + ": " + why); }
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  const KeyValues& kv_;
  std::vector<std::string> errors_;
};

std::size_t parse_count_item(const std::string& s) {
  std::size_t used = 0;
  if (s.empty() || s[0] == '-') throw std::invalid_argument("negative");
  const auto v = std::stoull(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing");
  return static_cast<std::size_t>(v);
}

double parse_real_item(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("bad");
  return v;
}

std::optional<ImageShape> parse_image(const std::string& s) {
  if (s.empty()) return std::nullopt;
  ImageShape shape;
  char x1 = 0;
  char x2 = 0;
  std::istringstream in(s);
  in >> shape.height >> x1 >> shape.width >> x2 >> shape.channels;
  if (!in || x1 != 'x' || x2 != 'x' || shape.size() == 0 || !in.eof()) {
    throw std::invalid_argument("expected HxWxC, got '" + s + "'");
  }
  return shape;
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> errors;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      errors.push_back("line " + std::to_string(line_no) + ": empty key");
      continue;
    }
    if (kv.count(key)) {
      errors.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
      continue;
    }
    kv[key] = trim(line.substr(eq + 1));
  }
  if (!errors.empty()) {
    std::string msg = "config syntax errors:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

KeyValues apply_overrides(KeyValues base, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not key=value");
    base[trim(o.substr(0, eq))] = trim(o.substr(eq + 1));
  }
  return base;
}

std::vector<SweepCell> ExperimentConfig::cells() const {
  std::vector<SweepCell> out;
  for (std::size_t n : sweep_n) {
    for (std::size_t neurons : sweep_neurons) {
      for (std::size_t rounds : sweep_rounds) {
        for (double noise : sweep_noise) out.push_back({n, neurons, rounds, noise});
      }
    }
  }
  return out;
}

ExperimentConfig config_from_key_values(const KeyValues& kv) {
  KeyValues merged = defaults();
  std::vector<std::string> unknown;
  for (const auto& [k, v] : kv) {
    if (!merged.count(k)) {
      unknown.push_back(k);
      continue;
    }
    merged[k] = v;
  }

  Reader rd(merged);
  for (const auto& k : unknown) rd.fail(k, "unknown key");

  ExperimentConfig cfg;
  cfg.echo = merged;

  auto& ds = cfg.dataset;
  ds.source = rd.choice("dataset.source", [](const std::string& s) {
    if (s == "synthetic") return SourceKind::synthetic;
    if (s == "csv") return SourceKind::csv;
    if (s == "tensor") return SourceKind::tensor;
    throw std::invalid_argument("expected synthetic, csv or tensor, got '" + s + "'");
  });
  ds.distribution = rd.choice("dataset.distribution", parse_distribution);
  ds.dim = rd.count("dataset.dim", 1);
  ds.classes = rd.count("dataset.classes", 2);
  ds.path = rd.raw("dataset.path");
  ds.label_column = rd.raw("dataset.label_column");
  ds.scaling = rd.choice("dataset.scaling", parse_scaling);
  ds.classes_per_client = rd.count("dataset.classes_per_client");
  ds.image = rd.choice("dataset.image", parse_image);
  if (ds.source != SourceKind::synthetic && ds.path.empty()) {
    rd.fail("dataset.path", "required for csv and tensor sources");
  }
  if (ds.classes_per_client > ds.classes) {
    rd.fail("dataset.classes_per_client", "exceeds dataset.classes");
  }

  cfg.method = rd.choice("method", [](const std::string& s) {
    if (s == "hyperplane") return Method::hyperplane;
    if (s == "cah") return Method::cah;
    throw std::invalid_argument("expected hyperplane or cah, got '" + s + "'");
  });

  auto& at = cfg.attack;
  at.weight_mode = rd.choice("attack.weight_mode", parse_weight_mode);
  at.epsilon = rd.real("attack.epsilon");
  at.g_equal_tol = rd.real("attack.g_equal_tol");
  at.residual_tol = rd.real("attack.residual_tol");
  at.classifier_bias = rd.real("attack.classifier_bias");
  at.hidden_layers = rd.count("attack.hidden_layers");
  at.hidden_width = rd.count("attack.hidden_width", 1);
  at.classes = ds.classes;
  if (at.epsilon < 0.0) rd.fail("attack.epsilon", "must be >= 0");
  if (at.g_equal_tol < 0.0) rd.fail("attack.g_equal_tol", "must be >= 0");
  if (at.residual_tol < 0.0) rd.fail("attack.residual_tol", "must be >= 0");

  cfg.cah.weight_std = rd.real("cah.weight_std");
  cfg.cah.scale_factor = rd.real("cah.scale_factor");
  cfg.cah.classes = ds.classes;
  if (!(cfg.cah.weight_std > 0.0)) rd.fail("cah.weight_std", "must be > 0");
  if (!(cfg.cah.scale_factor > 0.0 && cfg.cah.scale_factor < 1.0)) {
    rd.fail("cah.scale_factor", "must lie in (0, 1)");
  }

  const std::string mode = rd.raw("client.mode");
  if (mode == "full_batch") {
    cfg.client_mode = FullBatch{};
  } else if (mode == "local_steps") {
    LocalSteps local;
    local.steps = rd.count("client.local_steps", 1);
    local.minibatch = rd.count("client.minibatch", 1);
    local.learning_rate = rd.real("client.learning_rate");
    if (!(local.learning_rate > 0.0)) rd.fail("client.learning_rate", "must be > 0");
    cfg.client_mode = local;
  } else {
    rd.fail("client.mode", "expected full_batch or local_steps, got '" + mode + "'");
  }
  cfg.precision = rd.choice("client.precision", [](const std::string& s) {
    if (s == "f64") return Precision::f64;
    if (s == "f32") return Precision::f32;
    throw std::invalid_argument("expected f64 or f32, got '" + s + "'");
  });
  cfg.report_sample_count = rd.flag("client.report_sample_count");

  cfg.sweep_n = rd.list<std::size_t>("sweep.n", parse_count_item);
  cfg.sweep_neurons = rd.list<std::size_t>("sweep.neurons", parse_count_item);
  cfg.sweep_rounds = rd.list<std::size_t>("sweep.rounds", parse_count_item);
  cfg.sweep_noise = rd.list<double>("sweep.noise", parse_real_item);
  cfg.seeds = rd.list<std::uint64_t>("seeds", [](const std::string& s) {
    return static_cast<std::uint64_t>(parse_count_item(s));
  });
  for (std::size_t n : cfg.sweep_n) {
    if (n == 0) rd.fail("sweep.n", "batch sizes must be >= 1");
  }
  for (std::size_t v : cfg.sweep_neurons) {
    if (v == 0) rd.fail("sweep.neurons", "neuron counts must be >= 1");
  }
  for (std::size_t v : cfg.sweep_rounds) {
    if (v == 0) rd.fail("sweep.rounds", "round budgets must be >= 1");
  }
  for (double s : cfg.sweep_noise) {
    if (s < 0.0) rd.fail("sweep.noise", "noise levels must be >= 0");
  }
  if (const auto* local = std::get_if<LocalSteps>(&cfg.client_mode)) {
    for (std::size_t n : cfg.sweep_n) {
      if (local->steps * local->minibatch > n) {
        rd.fail("client.local_steps", "steps x minibatch exceeds batch size " + std::to_string(n));
      }
    }
  }

  cfg.output_path = rd.raw("output.path");
  cfg.format = rd.choice("output.format", [](const std::string& s) {
    if (s == "json") return ReportFormat::json;
    if (s == "csv") return ReportFormat::csv;
    throw std::invalid_argument("expected json or csv, got '" + s + "'");
  });
  cfg.hull_stats = rd.flag("report.hull_stats");
  cfg.timing = rd.flag("report.timing");
  cfg.round_bound_delta = rd.real("report.round_bound_delta");
  if (!(cfg.round_bound_delta > 0.0 && cfg.round_bound_delta < 1.0)) {
    rd.fail("report.round_bound_delta", "must lie in (0, 1)");
  }

  if (!rd.errors().empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : rd.errors()) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

}  // namespace hpr
