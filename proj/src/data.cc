// Copyright 2026 The robust-recourse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "robrec/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "robrec/error.h"
#include "robrec/rng.h"

namespace robrec {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(Trim(line.substr(start)));
      return fields;
    }
    fields.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool ParseDouble(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

Dataset ParseCsv(const std::string& text, const std::string& label_column,
                 const std::string& source) {
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, header_line)) {
    ++line_no;
    if (!Trim(header_line).empty()) break;
  }
  if (Trim(header_line).empty()) {
    ThrowInvalid(source + ": empty file");
  }
  header = SplitFields(header_line);

  size_t label_index = header.size();
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == label_column) label_index = i;
  }
  if (label_index == header.size()) {
    ThrowInvalid(source + ": missing label column '" + label_column + "'",
                 "label_column");
  }

  Dataset ds;
  for (size_t i = 0; i < header.size(); ++i) {
    if (i != label_index) ds.feature_names.emplace_back(header[i]);
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto fields = SplitFields(line);
    if (fields.size() != header.size()) {
      ThrowInvalid(source + ": row " + std::to_string(line_no) + " has " +
                   std::to_string(fields.size()) + " fields, expected " +
                   std::to_string(header.size()));
    }
    Vector row;
    row.reserve(header.size() - 1);
    for (size_t i = 0; i < fields.size(); ++i) {
      double value = 0.0;
      if (!ParseDouble(fields[i], value)) {
        ThrowInvalid(source + ": non-numeric cell at row " +
                     std::to_string(line_no) + ", column '" +
                     std::string(header[i]) + "'");
      }
      if (i == label_index) {
        if (value != 0.0 && value != 1.0) {
          ThrowInvalid(source + ": non-binary label at row " +
                       std::to_string(line_no));
        }
        ds.labels.push_back(static_cast<int>(value));
      } else {
        row.push_back(value);
      }
    }
    ds.features.push_back(std::move(row));
  }
  if (ds.rows() == 0) {
    ThrowInvalid(source + ": empty file (no data rows)");
  }
  return ds;
}

Dataset LoadCsv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open '" + path + "'", "data");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseCsv(buffer.str(), label_column, path);
}

std::string FormatCsv(const Dataset& ds) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& name : ds.feature_names) out << name << ',';
  out << "label\n";
  for (size_t i = 0; i < ds.rows(); ++i) {
    for (double v : ds.features[i]) out << v << ',';
    out << ds.labels[i] << '\n';
  }
  return out.str();
}

Dataset Normalize(const Dataset& ds) {
  if (ds.rows() == 0) ThrowInvalid("cannot normalize an empty data set");
  std::vector<NormParam> params(ds.dims());
  for (size_t j = 0; j < ds.dims(); ++j) {
    double lo = ds.features[0][j];
    double hi = lo;
    for (const auto& row : ds.features) {
      lo = std::min(lo, row[j]);
      hi = std::max(hi, row[j]);
    }
    params[j] = {lo, hi};
  }
  return ApplyNormalization(ds, params);
}

Vector NormalizePoint(ConstSpan raw, const std::vector<NormParam>& params) {
  if (raw.size() != params.size()) {
    ThrowInvalid("dimension mismatch: point has " +
                 std::to_string(raw.size()) + " features, expected " +
                 std::to_string(params.size()));
  }
  Vector out(raw.size());
  for (size_t j = 0; j < raw.size(); ++j) {
    const double range = params[j].max - params[j].min;
    out[j] = range > 0.0 ? (raw[j] - params[j].min) / range : 0.0;
  }
  return out;
}

Vector DenormalizePoint(ConstSpan unit, const std::vector<NormParam>& params) {
  if (unit.size() != params.size()) {
    ThrowInvalid("dimension mismatch: point has " +
                 std::to_string(unit.size()) + " features, expected " +
                 std::to_string(params.size()));
  }
  Vector out(unit.size());
  for (size_t j = 0; j < unit.size(); ++j) {
    out[j] = params[j].min + unit[j] * (params[j].max - params[j].min);
  }
  return out;
}

Dataset ApplyNormalization(const Dataset& ds,
                           const std::vector<NormParam>& params) {
  Dataset out = ds;
  for (auto& row : out.features) row = NormalizePoint(row, params);
  out.norm_params = params;
  return out;
}

Dataset Subset(const Dataset& ds, const std::vector<size_t>& rows) {
  Dataset out;
  out.feature_names = ds.feature_names;
  out.norm_params = ds.norm_params;
  out.features.reserve(rows.size());
  out.labels.reserve(rows.size());
  for (size_t r : rows) {
    out.features.push_back(ds.features.at(r));
    out.labels.push_back(ds.labels.at(r));
  }
  return out;
}

std::pair<Dataset, Dataset> Split(const Dataset& ds, double test_fraction,
                                  uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    ThrowInvalid("test_fraction must lie in (0, 1)", "test_fraction");
  }
  const size_t n = ds.rows();
  if (n < 2) ThrowInvalid("cannot split fewer than 2 rows");
  size_t n_test = static_cast<size_t>(
      std::llround(static_cast<double>(n) * test_fraction));
  n_test = std::clamp<size_t>(n_test, 1, n - 1);

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  rng.Shuffle(std::span<size_t>(order));
  std::vector<size_t> test_rows(order.begin(), order.begin() + n_test);
  std::vector<size_t> train_rows(order.begin() + n_test, order.end());
  std::sort(test_rows.begin(), test_rows.end());
  std::sort(train_rows.begin(), train_rows.end());
  return {Subset(ds, train_rows), Subset(ds, test_rows)};
}

Dataset MakeMoons(size_t n, double noise, uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.feature_names = {"x0", "x1"};
  const size_t n_upper = n / 2;
  const size_t n_lower = n - n_upper;
  auto angle = [](size_t i, size_t count) {
    return count <= 1 ? 0.0
                      : std::numbers::pi * static_cast<double>(i) /
                            static_cast<double>(count - 1);
  };
  for (size_t i = 0; i < n_upper; ++i) {
    const double t = angle(i, n_upper);
    ds.features.push_back({std::cos(t) + noise * rng.Normal(),
                           std::sin(t) + noise * rng.Normal()});
    ds.labels.push_back(0);
  }
  for (size_t i = 0; i < n_lower; ++i) {
    const double t = angle(i, n_lower);
    ds.features.push_back({1.0 - std::cos(t) + noise * rng.Normal(),
                           0.5 - std::sin(t) + noise * rng.Normal()});
    ds.labels.push_back(1);
  }
  return ds;
}

Dataset MakeBlobs(size_t n, double spread, double margin, uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.feature_names = {"x0", "x1"};
  for (size_t i = 0; i < n; ++i) {
    const int label = i < n / 2 ? 0 : 1;
    const double center = label == 0 ? 0.3 : 0.7;
    Vector p(2);
    double distance = 0.0;
    do {
      p = {center + spread * rng.Normal(), center + spread * rng.Normal()};
      // Signed distance to x0 + x1 = 1, positive on the label-1 side.
      distance = (p[0] + p[1] - 1.0) / std::numbers::sqrt2;
      if (label == 0) distance = -distance;
    } while (margin > 0.0 && distance < margin / 2.0);
    ds.features.push_back(std::move(p));
    ds.labels.push_back(label);
  }
  return ds;
}

}  // namespace robrec
