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


// Glue shared by the command-line tool and the HTTP service: data sources,
// model training and loading, and dispatch from a method name to a
// recourse generator.

#ifndef ROBREC_PIPELINE_H_
#define ROBREC_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "robrec/analysis.h"
#include "robrec/data.h"
#include "robrec/forest.h"
#include "robrec/model.h"
#include "robrec/recourse.h"
#include "robrec/serialization.h"

namespace robrec {

// Data sources "fixture:moons" and "fixture:blobs" name the bundled
// synthetic generators (fixed size and seed); anything else is a CSV path.
inline constexpr char kMoonsFixture[] = "fixture:moons";
inline constexpr char kBlobsFixture[] = "fixture:blobs";

Dataset LoadSource(const std::string& source, const std::string& label_column);

struct DataView {
  Dataset train;
  Dataset test;
};

// Normalizes `raw` (with `norm_params` when given, else fitted on `raw`) and
// splits it.
DataView PrepareData(const Dataset& raw,
                     const std::vector<NormParam>* norm_params,
                     double test_fraction, uint64_t seed);

struct ForestConfig {
  size_t n_trees = 30;
  int max_depth = 6;
  int distill_depth = 8;
};

// kind is "linear", "mlp" or "forest". Forests are distilled on the training
// inputs right away.
ModelArtifact TrainArtifact(const std::string& kind, const Dataset& train,
                            const TrainConfig& cfg, const ForestConfig& forest);

// A model ready for recourse queries; immutable and shareable.
class LoadedModel {
 public:
  explicit LoadedModel(ModelArtifact artifact);

  const ModelArtifact& artifact() const { return artifact_; }
  const Classifier& classifier() const { return artifact_.classifier(); }
  // Null for forests.
  const ScoreModel* score_model() const { return artifact_.score_model.get(); }
  // Regions of the distilled tree; null for score models.
  const RegionSet* regions() const { return regions_.get(); }
  size_t dims() const { return artifact_.dims(); }

 private:
  ModelArtifact artifact_;
  std::shared_ptr<const RegionSet> regions_;
};

struct MethodSpec {
  // wachter | probe | probe-mc | probe-tree
  std::string method = "probe";
  double r = 0.35;
  double sigma2 = 0.01;
  double lambda1 = 2.0;
  double lambda2 = 1.0;
  std::vector<double> lambda3_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  double alpha = 0.05;
  size_t max_iters = 1000;
  CostNorm cost = CostNorm::kL1;
  double target_score = 0.0;
  // Wachter only: aim for the score whose linear IR is exactly r.
  bool robust_target = false;
  size_t mc_samples = 1000;
  double temperature = 100.0;
  uint64_t seed = 0;
  std::vector<bool> frozen;

  void Validate(const LoadedModel& model) const;
};

// Runs the configured generator on x. Monte-Carlo draws for instance `row`
// use MixSeed(spec.seed, row).
RecourseResult RunMethod(const LoadedModel& model, ConstSpan x,
                         const MethodSpec& spec, size_t row);

RecourseGenerator MakeGenerator(const LoadedModel& model,
                                const MethodSpec& spec);

// Echo of the parameters that shaped a result.
Json MethodSpecToJson(const MethodSpec& spec);

// Bound check at sigma = sqrt(sigma2) for score models; nullopt otherwise.
std::optional<BoundCheck> BoundFor(const LoadedModel& model, ConstSpan x,
                                   const RecourseResult& result,
                                   double sigma2);

}  // namespace robrec

#endif  // ROBREC_PIPELINE_H_
