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

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hpr/error.hpp"
#include "hpr/experiment.hpp"

namespace hpr {

namespace {

using nlohmann::json;

bool timing_enabled(const ExperimentReport& report) {
  const auto it = report.config.find("report.timing");
  return it != report.config.end() && (it->second == "true" || it->second == "1" ||
                                        it->second == "yes");
}

template <typename T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_quote(std::string s) {
  for (auto& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::string> csv_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell += ch;
    }
  }
  cells.push_back(cell);
  return cells;
}

}  // namespace

const std::vector<std::string>& report_csv_header() {
  static const std::vector<std::string> header = {
      "cell",         "n",           "neurons",        "rounds",
      "noise",        "seed",        "method",         "n_true",
      "n_recovered",  "fraction",    "labels_known",   "labels_correct",
      "unmatched_recovered",         "collisions",     "unrecoverable",
      "rounds_used",  "round_bound", "hull_vertices",  "wall_time_seconds",
      "error"};
  return header;
}

json report_to_json(const ExperimentReport& report) {
  const bool timing = timing_enabled(report);
  json doc;
  doc["config"] = json::object();
  for (const auto& [k, v] : report.config) doc["config"][k] = v;
  doc["records"] = json::array();
  for (const auto& r : report.records) {
    json j;
    j["cell"] = r.cell;
    j["n"] = r.params.n;
    j["neurons"] = r.params.neurons;
    j["rounds"] = r.params.rounds;
    j["noise"] = r.params.noise;
    j["seed"] = r.seed;
    j["method"] = r.method;
    j["n_true"] = r.stats.n_true;
    j["n_recovered"] = r.stats.n_recovered_exact;
    j["fraction"] = r.stats.fraction;
    j["labels_known"] = r.stats.labels_known;
    j["labels_correct"] = r.stats.labels_correct;
    j["unmatched_recovered"] = r.stats.unmatched_recovered;
    j["collisions"] = r.collisions;
    j["unrecoverable"] = r.unrecoverable;
    j["rounds_used"] = r.stats.rounds_used;
    j["round_bound"] = opt_json(r.round_bound_prediction);
    j["hull_vertices"] = opt_json(r.hull_vertex_count);
    json errs = json::array();
    for (const auto& e : r.stats.per_sample_error) errs.push_back(opt_json(e));
    j["per_sample_error"] = std::move(errs);
    if (timing) j["wall_time_seconds"] = r.stats.wall_time_seconds;
    if (r.error) j["error"] = *r.error;
    doc["records"].push_back(std::move(j));
  }
  doc["aggregates"] = json::array();
  for (const auto& a : report.aggregates) {
    doc["aggregates"].push_back({{"cell", a.cell},
                                 {"n", a.params.n},
                                 {"neurons", a.params.neurons},
                                 {"rounds", a.params.rounds},
                                 {"noise", a.params.noise},
                                 {"runs", a.runs},
                                 {"fraction_mean", a.fraction.mean},
                                 {"fraction_std", a.fraction.std}});
  }
  return doc;
}

ExperimentReport report_from_json(const json& doc) {
  ExperimentReport report;
  try {
    for (const auto& [k, v] : doc.at("config").items()) report.config[k] = v.get<std::string>();
    for (const auto& j : doc.at("records")) {
      RunRecord r;
      r.cell = j.at("cell").get<std::size_t>();
      r.params.n = j.at("n").get<std::size_t>();
      r.params.neurons = j.at("neurons").get<std::size_t>();
      r.params.rounds = j.at("rounds").get<std::size_t>();
      r.params.noise = j.at("noise").get<double>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.method = j.at("method").get<std::string>();
      r.stats.n_true = j.at("n_true").get<std::size_t>();
      r.stats.n_recovered_exact = j.at("n_recovered").get<std::size_t>();
      r.stats.fraction = j.at("fraction").get<double>();
      r.stats.labels_known = j.at("labels_known").get<std::size_t>();
      r.stats.labels_correct = j.at("labels_correct").get<std::size_t>();
      r.stats.unmatched_recovered = j.at("unmatched_recovered").get<std::size_t>();
      r.collisions = j.at("collisions").get<std::size_t>();
      r.unrecoverable = j.at("unrecoverable").get<std::size_t>();
      r.stats.rounds_used = j.at("rounds_used").get<std::size_t>();
      if (!j.at("round_bound").is_null()) r.round_bound_prediction = j["round_bound"].get<std::size_t>();
      if (!j.at("hull_vertices").is_null()) r.hull_vertex_count = j["hull_vertices"].get<std::size_t>();
      for (const auto& e : j.at("per_sample_error")) {
        r.stats.per_sample_error.push_back(e.is_null() ? std::nullopt
                                                       : std::optional<double>(e.get<double>()));
      }
      if (j.contains("wall_time_seconds")) {
        r.stats.wall_time_seconds = j["wall_time_seconds"].get<double>();
      }
      if (j.contains("error")) r.error = j["error"].get<std::string>();
      report.records.push_back(std::move(r));
    }
    for (const auto& j : doc.at("aggregates")) {
      CellAggregate a;
      a.cell = j.at("cell").get<std::size_t>();
      a.params.n = j.at("n").get<std::size_t>();
      a.params.neurons = j.at("neurons").get<std::size_t>();
      a.params.rounds = j.at("rounds").get<std::size_t>();
      a.params.noise = j.at("noise").get<double>();
      a.runs = j.at("runs").get<std::size_t>();
      a.fraction.mean = j.at("fraction_mean").get<double>();
      a.fraction.std = j.at("fraction_std").get<double>();
      report.aggregates.push_back(a);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("report json: ") + e.what());
  }
  return report;
}

std::string report_to_csv(const ExperimentReport& report) {
  const bool timing = timing_enabled(report);
  std::ostringstream out;
  const auto& header = report_csv_header();
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << "\n";
  for (const auto& r : report.records) {
    const auto opt = [](const std::optional<std::size_t>& v) {
      return v ? std::to_string(*v) : std::string();
    };
    out << r.cell << ',' << r.params.n << ',' << r.params.neurons << ',' << r.params.rounds << ','
        << fmt_real(r.params.noise) << ',' << r.seed << ',' << csv_quote(r.method) << ','
        << r.stats.n_true << ',' << r.stats.n_recovered_exact << ',' << fmt_real(r.stats.fraction)
        << ',' << r.stats.labels_known << ',' << r.stats.labels_correct << ','
        << r.stats.unmatched_recovered << ',' << r.collisions << ',' << r.unrecoverable << ','
        << r.stats.rounds_used << ',' << opt(r.round_bound_prediction) << ','
        << opt(r.hull_vertex_count) << ','
        << (timing ? fmt_real(r.stats.wall_time_seconds) : std::string()) << ','
        << (r.error ? csv_quote(*r.error) : std::string()) << "\n";
  }
  return out.str();
}

std::vector<RunRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || csv_cells(line) != report_csv_header()) {
    throw FormatError("report csv: header does not match");
  }
  std::vector<RunRecord> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto c = csv_cells(line);
    if (c.size() != report_csv_header().size()) {
      throw FormatError("report csv: row " + std::to_string(row) + " has the wrong cell count");
    }
    try {
      RunRecord r;
      r.cell = std::stoull(c[0]);
      r.params.n = std::stoull(c[1]);
      r.params.neurons = std::stoull(c[2]);
      r.params.rounds = std::stoull(c[3]);
      r.params.noise = std::stod(c[4]);
      r.seed = std::stoull(c[5]);
      r.method = c[6];
      r.stats.n_true = std::stoull(c[7]);
      r.stats.n_recovered_exact = std::stoull(c[8]);
      r.stats.fraction = std::stod(c[9]);
      r.stats.labels_known = std::stoull(c[10]);
      r.stats.labels_correct = std::stoull(c[11]);
      r.stats.unmatched_recovered = std::stoull(c[12]);
      r.collisions = std::stoull(c[13]);
      r.unrecoverable = std::stoull(c[14]);
      r.stats.rounds_used = std::stoull(c[15]);
      if (!c[16].empty()) r.round_bound_prediction = std::stoull(c[16]);
      if (!c[17].empty()) r.hull_vertex_count = std::stoull(c[17]);
      if (!c[18].empty()) r.stats.wall_time_seconds = std::stod(c[18]);
      if (!c[19].empty()) r.error = c[19];
      records.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw FormatError("report csv: unparsable value in row " + std::to_string(row));
    }
  }
  return records;
}

void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report to " + path.string());
  if (format == ReportFormat::json) {
    out << report_to_json(report).dump(2) << "\n";
  } else {
    out << report_to_csv(report);
  }
  if (!out) throw IoError("write failed for report " + path.string());
}

}  // namespace hpr
