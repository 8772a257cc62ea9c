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

#ifndef ROBREC_DATA_H_
#define ROBREC_DATA_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "robrec/vector_ops.h"

namespace robrec {

// Per-feature min-max parameters recorded at normalization time.
struct NormParam {
  double min = 0.0;
  double max = 1.0;

  bool operator==(const NormParam&) const = default;
};

// Tabular data set with binary labels. `norm_params` is empty until the
// features have been mapped into the unit box.
struct Dataset {
  std::vector<Vector> features;
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  std::vector<NormParam> norm_params;

  size_t rows() const { return features.size(); }
  size_t dims() const { return feature_names.size(); }
  bool normalized() const { return !norm_params.empty(); }
};

// Reads a comma-separated file with a header row. Every column except
// `label_column` must be numeric; labels must be exactly 0 or 1.
Dataset LoadCsv(const std::string& path, const std::string& label_column);

// Parses CSV text; `source` is only used in error messages.
Dataset ParseCsv(const std::string& text, const std::string& label_column,
                 const std::string& source = "<memory>");

// Writes features and labels (label column last, named "label").
std::string FormatCsv(const Dataset& ds);

// Maps each column by (x - min) / (max - min). Constant columns map to 0.
Dataset Normalize(const Dataset& ds);

// Applies previously recorded parameters, e.g. those stored with a model.
Dataset ApplyNormalization(const Dataset& ds,
                           const std::vector<NormParam>& params);

Vector NormalizePoint(ConstSpan raw, const std::vector<NormParam>& params);
Vector DenormalizePoint(ConstSpan unit, const std::vector<NormParam>& params);

// Seeded partition into (train, test); test size is round(n * fraction),
// clamped so both parts are non-empty. Original row order is preserved
// within each part.
std::pair<Dataset, Dataset> Split(const Dataset& ds, double test_fraction,
                                  uint64_t seed);

Dataset Subset(const Dataset& ds, const std::vector<size_t>& rows);

// Two interleaving half circles (label 0 upper, label 1 lower), with
// Gaussian jitter of standard deviation `noise`.
Dataset MakeMoons(size_t n, double noise, uint64_t seed);

// Two Gaussian clusters around (0.3, 0.3) and (0.7, 0.7). Points closer than
// margin / 2 to the line x0 + x1 = 1 are rejected, so margin > 0 yields a
// linearly separable set with that gap.
Dataset MakeBlobs(size_t n, double spread, double margin, uint64_t seed);

}  // namespace robrec

#endif  // ROBREC_DATA_H_
