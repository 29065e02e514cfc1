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

#include "hpr/data.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "hpr/error.hpp"

namespace hpr {

FeatureBounds FeatureBounds::uniform(std::size_t dim, double lo, double hi) {
  return {std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
}

void FeatureBounds::validate() const {
  if (lo.empty()) throw InvalidInput("FeatureBounds: empty");
  if (lo.size() != hi.size()) throw InvalidInput("FeatureBounds: lo/hi length mismatch");
  for (std::size_t j = 0; j < lo.size(); ++j) {
    if (!std::isfinite(lo[j]) || !std::isfinite(hi[j]) || !(lo[j] < hi[j])) {
      throw InvalidInput("FeatureBounds: feature " + std::to_string(j) + " needs finite lo < hi");
    }
  }
}

bool FeatureBounds::contains(const DenseVector& x) const {
  if (x.size() != lo.size()) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] >= lo[j] && x[j] <= hi[j])) return false;
  }
  return true;
}

Distribution parse_distribution(const std::string& name) {
  if (name == "ball") return Distribution::ball;
  if (name == "cube") return Distribution::cube;
  if (name == "gauss") return Distribution::gauss;
  throw ConfigError("unknown distribution '" + name + "'");
}

std::string to_string(Distribution dist) {
  switch (dist) {
    case Distribution::ball:
      return "ball";
    case Distribution::cube:
      return "cube";
    case Distribution::gauss:
      return "gauss";
  }
  return "gauss";
}

LabeledData gen_synthetic(Distribution dist, std::size_t n, std::size_t d, std::size_t classes,
                          std::uint64_t seed) {
  if (n == 0 || d == 0 || classes == 0) throw InvalidInput("gen_synthetic: n, d, C must be >= 1");
  SeededRng rng(seed);
  LabeledData out;
  out.batch.inputs.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    DenseVector x(d);
    switch (dist) {
      case Distribution::ball: {
        double norm = 0.0;
        do {
          for (auto& v : x) v = rng.normal();
          norm = norm2(x.span());
        } while (norm == 0.0);
        const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
        for (auto& v : x) v *= radius / norm;
        break;
      }
      case Distribution::cube:
        for (auto& v : x) v = rng.uniform();
        break;
      case Distribution::gauss:
        for (auto& v : x) v = std::clamp(rng.normal(), -kGaussianClip, kGaussianClip);
        break;
    }
    out.batch.inputs.push_back(std::move(x));
  }
  SeededRng label_rng = rng.fork(0x4c4142454cULL);
  for (std::size_t j = 0; j < n; ++j) out.batch.labels.push_back(label_rng.below(classes));
  switch (dist) {
    case Distribution::ball:
      out.bounds = FeatureBounds::uniform(d, -1.0, 1.0);
      break;
    case Distribution::cube:
      out.bounds = FeatureBounds::uniform(d, 0.0, 1.0);
      break;
    case Distribution::gauss:
      out.bounds = FeatureBounds::uniform(d, -kGaussianClip, kGaussianClip);
      break;
  }
  return out;
}

Scaling parse_scaling(const std::string& name) {
  if (name == "minus1to1") return Scaling::minus1to1;
  if (name == "zero1") return Scaling::zero1;
  if (name == "none") return Scaling::none;
  throw ConfigError("unknown scaling '" + name + "'");
}

double ColumnScaler::target_lo() const { return scaling == Scaling::minus1to1 ? -1.0 : 0.0; }
double ColumnScaler::target_hi() const { return 1.0; }

double ColumnScaler::apply(std::size_t col, double value) const {
  if (scaling == Scaling::none) return value;
  const double lo = target_lo();
  const double hi = target_hi();
  const double span = col_max[col] - col_min[col];
  if (span == 0.0) return 0.5 * (lo + hi);
  return lo + (value - col_min[col]) * (hi - lo) / span;
}

double ColumnScaler::invert(std::size_t col, double scaled) const {
  if (scaling == Scaling::none) return scaled;
  const double lo = target_lo();
  const double hi = target_hi();
  const double span = col_max[col] - col_min[col];
  if (span == 0.0) return col_min[col];
  return col_min[col] + (scaled - lo) * span / (hi - lo);
}

ColumnScaler fit_scaler(const std::vector<DenseVector>& rows, Scaling scaling) {
  ColumnScaler s;
  s.scaling = scaling;
  if (rows.empty()) return s;
  const std::size_t d = rows.front().size();
  s.col_min.assign(d, std::numeric_limits<double>::infinity());
  s.col_max.assign(d, -std::numeric_limits<double>::infinity());
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < d; ++c) {
      s.col_min[c] = std::min(s.col_min[c], r[c]);
      s.col_max[c] = std::max(s.col_max[c], r[c]);
    }
  }
  return s;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& text, std::size_t row, std::size_t col) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size()) {
    throw FormatError("csv: non-numeric cell '" + t + "' at row " + std::to_string(row) +
                      ", column " + std::to_string(col));
  }
  return value;
}

}  // namespace

LabeledData load_csv(const std::filesystem::path& path, const std::string& label_column,
                     Scaling scaling, ColumnScaler* scaler_out) {
  std::ifstream in(path);
  if (!in) throw IoError("csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("csv: missing header row in " + path.string());
  const auto header = split_csv_line(line);

  std::size_t label_idx = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (trim(header[c]) == label_column) label_idx = c;
  }
  if (label_idx == header.size()) {
    const bool digits = !label_column.empty() &&
                        std::all_of(label_column.begin(), label_column.end(),
                                    [](char ch) { return ch >= '0' && ch <= '9'; });
    if (digits) label_idx = std::stoul(label_column);
  }
  if (label_idx >= header.size()) {
    throw ConfigError("csv: label column '" + label_column + "' not found in " + path.string());
  }

  std::vector<DenseVector> rows;
  std::vector<std::size_t> labels;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw FormatError("csv: row " + std::to_string(row_no) + " has " +
                        std::to_string(cells.size()) + " cells, header has " +
                        std::to_string(header.size()));
    }
    DenseVector x(header.size() - 1);
    std::size_t k = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const double value = parse_cell(cells[c], row_no, c);
      if (c == label_idx) {
        if (value < 0.0 || value != std::floor(value)) {
          throw FormatError("csv: label at row " + std::to_string(row_no) +
                            " is not a non-negative integer");
        }
        labels.push_back(static_cast<std::size_t>(value));
      } else {
        x[k++] = value;
      }
    }
    rows.push_back(std::move(x));
  }
  if (rows.empty()) throw FormatError("csv: no data rows in " + path.string());

  const ColumnScaler scaler = fit_scaler(rows, scaling);
  for (auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) r[c] = scaler.apply(c, r[c]);
  }

  LabeledData out;
  out.batch.inputs = std::move(rows);
  out.batch.labels = std::move(labels);
  const std::size_t d = out.batch.dim();
  if (scaling == Scaling::none) {
    // Bounds from the data, widened where a column is constant.
    out.bounds.lo = scaler.col_min;
    out.bounds.hi = scaler.col_max;
    for (std::size_t c = 0; c < d; ++c) {
      if (!(out.bounds.lo[c] < out.bounds.hi[c])) {
        out.bounds.lo[c] -= 0.5;
        out.bounds.hi[c] += 0.5;
      }
    }
  } else {
    out.bounds = FeatureBounds::uniform(d, scaler.target_lo(), scaler.target_hi());
  }
  if (scaler_out) *scaler_out = scaler;
  return out;
}

void save_csv(const std::filesystem::path& path, const Batch& batch) {
  std::ofstream out(path);
  if (!out) throw IoError("csv: cannot write " + path.string());
  const std::size_t d = batch.dim();
  for (std::size_t c = 0; c < d; ++c) out << "f" << c << ",";
  out << "label\n";
  out.precision(17);
  for (std::size_t j = 0; j < batch.size(); ++j) {
    for (std::size_t c = 0; c < d; ++c) out << batch.inputs[j][c] << ",";
    out << batch.labels[j] << "\n";
  }
  if (!out) throw IoError("csv: write failed for " + path.string());
}

namespace {

constexpr std::array<char, 4> kTensorMagic = {'H', 'R', 'T', '1'};

std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_u32_le(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

double read_f64_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int k = 7; k >= 0; --k) bits = (bits << 8) | p[k];
  return std::bit_cast<double>(bits);
}

void write_f64_le(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int k = 0; k < 8; ++k) {
    b[k] = static_cast<unsigned char>(bits & 0xff);
    bits >>= 8;
  }
  out.write(reinterpret_cast<const char*>(b), 8);
}

}  // namespace

LabeledData load_tensor(const std::filesystem::path& path, std::size_t classes,
                        std::uint64_t label_seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("tensor: cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || !std::equal(kTensorMagic.begin(), kTensorMagic.end(), bytes.begin(),
                                       [](char a, unsigned char b) {
                                         return static_cast<unsigned char>(a) == b;
                                       })) {
    throw FormatError("tensor: bad magic in " + path.string());
  }
  const std::uint32_t n = read_u32_le(bytes.data() + 4);
  const std::uint32_t d = read_u32_le(bytes.data() + 8);
  if (n == 0 || d == 0) throw FormatError("tensor: zero-sized header in " + path.string());
  const std::uint64_t expected = 12 + 8ULL * n * d;
  if (bytes.size() != expected) {
    throw FormatError("tensor: payload is " + std::to_string(bytes.size() - 12) +
                      " bytes, header declares " + std::to_string(expected - 12));
  }
  if (classes == 0) throw InvalidInput("load_tensor: classes must be >= 1");
  LabeledData out;
  const unsigned char* p = bytes.data() + 12;
  for (std::uint32_t j = 0; j < n; ++j) {
    DenseVector x(d);
    for (std::uint32_t c = 0; c < d; ++c, p += 8) x[c] = read_f64_le(p);
    out.batch.inputs.push_back(std::move(x));
  }
  SeededRng rng(label_seed);
  for (std::uint32_t j = 0; j < n; ++j) out.batch.labels.push_back(rng.below(classes));
  out.bounds = FeatureBounds::uniform(d, 0.0, 1.0);
  return out;
}

void save_tensor(const std::filesystem::path& path, const std::vector<DenseVector>& inputs) {
  if (inputs.empty()) throw InvalidInput("save_tensor: no inputs");
  const std::size_t d = inputs.front().size();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("tensor: cannot write " + path.string());
  out.write(kTensorMagic.data(), 4);
  write_u32_le(out, static_cast<std::uint32_t>(inputs.size()));
  write_u32_le(out, static_cast<std::uint32_t>(d));
  for (const auto& x : inputs) {
    if (x.size() != d) throw InvalidInput("save_tensor: ragged inputs");
    for (double v : x) write_f64_le(out, v);
  }
  if (!out) throw IoError("tensor: write failed for " + path.string());
}

std::vector<std::size_t> chosen_classes(std::size_t classes, std::size_t classes_per_client,
                                        std::uint64_t seed, std::size_t client) {
  if (classes_per_client == 0 || classes_per_client > classes) {
    throw ConfigError("partition: classes per client must lie in [1, C]");
  }
  if ((client + 1) * classes_per_client > classes) {
    throw ConfigError("partition: client " + std::to_string(client) + " has no class block left");
  }
  std::vector<std::size_t> all(classes);
  std::iota(all.begin(), all.end(), 0);
  SeededRng rng(seed);
  rng.shuffle(all);
  std::vector<std::size_t> block(all.begin() + static_cast<std::ptrdiff_t>(client * classes_per_client),
                                 all.begin() + static_cast<std::ptrdiff_t>((client + 1) * classes_per_client));
  std::sort(block.begin(), block.end());
  return block;
}

Batch partition_non_iid(const Batch& batch, std::size_t classes, std::size_t classes_per_client,
                        std::uint64_t seed, std::size_t client) {
  const auto keep = chosen_classes(classes, classes_per_client, seed, client);
  Batch out;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    if (std::binary_search(keep.begin(), keep.end(), batch.labels[j])) {
      out.inputs.push_back(batch.inputs[j]);
      out.labels.push_back(batch.labels[j]);
    }
  }
  if (out.inputs.empty()) throw ConfigError("partition: no samples in the chosen classes");
  return out;
}

Batch subsample(const Batch& batch, std::size_t n, std::uint64_t seed) {
  if (n > batch.size()) {
    throw ConfigError("subsample: requested " + std::to_string(n) + " samples from " +
                      std::to_string(batch.size()));
  }
  std::vector<std::size_t> order(batch.size());
  std::iota(order.begin(), order.end(), 0);
  SeededRng rng(seed);
  rng.shuffle(order);
  Batch out;
  for (std::size_t k = 0; k < n; ++k) {
    out.inputs.push_back(batch.inputs[order[k]]);
    out.labels.push_back(batch.labels[order[k]]);
  }
  return out;
}

}  // namespace hpr
