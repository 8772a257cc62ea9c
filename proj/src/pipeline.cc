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


#include "robrec/pipeline.h"

#include <cmath>

#include "robrec/error.h"
#include "robrec/ir.h"
#include "robrec/rng.h"

namespace robrec {

Dataset LoadSource(const std::string& source, const std::string& label_column) {
  if (source == kMoonsFixture) return MakeMoons(600, 0.1, 17);
  if (source == kBlobsFixture) return MakeBlobs(400, 0.1, 0.3, 23);
  if (source.rfind("fixture:", 0) == 0) {
    ThrowInvalid("unknown fixture '" + source + "'", "data");
  }
  return LoadCsv(source, label_column);
}

DataView PrepareData(const Dataset& raw,
                     const std::vector<NormParam>* norm_params,
                     double test_fraction, uint64_t seed) {
  const Dataset unit = norm_params != nullptr
                           ? ApplyNormalization(raw, *norm_params)
                           : Normalize(raw);
  auto [train, test] = Split(unit, test_fraction, seed);
  return {std::move(train), std::move(test)};
}

ModelArtifact TrainArtifact(const std::string& kind, const Dataset& train,
                            const TrainConfig& cfg,
                            const ForestConfig& forest) {
  ModelArtifact a;
  a.kind = kind;
  a.seed = cfg.seed;
  a.feature_names = train.feature_names;
  a.norm_params = train.norm_params;
  if (kind == "forest") {
    if (forest.n_trees < 1) ThrowInvalid("n_trees must be >= 1", "n_trees");
    if (forest.max_depth < 1) ThrowInvalid("max_depth must be >= 1", "max_depth");
    if (forest.distill_depth < 1) {
      ThrowInvalid("distill_depth must be >= 1", "distill_depth");
    }
    a.forest = std::make_shared<Forest>(FitForest(
        train.features, train.labels, forest.n_trees, forest.max_depth, cfg.seed));
    DistillResult distilled = Distill(*a.forest, train.features,
                                      forest.distill_depth, MixSeed(cfg.seed, 1));
    a.distilled = std::make_shared<Tree>(std::move(distilled.tree));
    a.fidelity = distilled.fidelity;
    return a;
  }
  a.score_model = Train(ParseModelKind(kind), train, cfg);
  return a;
}

LoadedModel::LoadedModel(ModelArtifact artifact)
    : artifact_(std::move(artifact)) {
  if (artifact_.distilled) {
    regions_ = std::make_shared<RegionSet>(ExtractRegions(*artifact_.distilled));
  }
}

void MethodSpec::Validate(const LoadedModel& model) const {
  if (method != "wachter" && method != "probe" && method != "probe-mc" &&
      method != "probe-tree") {
    ThrowInvalid("unknown method '" + method +
                     "' (expected wachter|probe|probe-mc|probe-tree)",
                 "method");
  }
  if (!(r > 0.0 && r < 1.0)) ThrowInvalid("r must lie in (0, 1)", "r");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    ThrowInvalid("sigma2 must be > 0", "sigma2");
  }
  if (method == "probe-tree") {
    if (model.regions() == nullptr) {
      ThrowInvalid("probe-tree needs a forest model", "method");
    }
  } else if (model.score_model() == nullptr) {
    ThrowInvalid("method '" + method + "' needs a linear or mlp model",
                 "method");
  }
  if (mc_samples < 1) ThrowInvalid("mc_samples must be >= 1", "mc_samples");
  if (!(temperature > 0.0)) ThrowInvalid("temperature must be > 0", "temperature");
  if (!frozen.empty() && frozen.size() != model.dims()) {
    ThrowInvalid("frozen mask has wrong length", "frozen");
  }
}

namespace {

ProbeParams ToProbeParams(const MethodSpec& spec) {
  ProbeParams p;
  p.r = spec.r;
  p.noise = NoiseModel::Isotropic(spec.sigma2);
  p.lambda1 = spec.lambda1;
  p.lambda2 = spec.lambda2;
  p.lambda3_grid = spec.lambda3_grid;
  p.step = spec.alpha;
  p.max_iters = spec.max_iters;
  p.cost = spec.cost;
  p.target_score = spec.target_score;
  p.frozen = spec.frozen;
  return p;
}

}  // namespace

RecourseResult RunMethod(const LoadedModel& model, ConstSpan x,
                         const MethodSpec& spec, size_t row) {
  spec.Validate(model);
  if (spec.method == "probe-tree") {
    return ProbeTree(*model.regions(), x, ToProbeParams(spec));
  }
  const ScoreModel& score_model = *model.score_model();
  if (spec.method == "probe") return Probe(score_model, x, ToProbeParams(spec));
  if (spec.method == "probe-mc") {
    McParams mc;
    mc.samples = spec.mc_samples;
    mc.temperature = spec.temperature;
    mc.seed = MixSeed(spec.seed, row);
    return ProbeMc(score_model, x, ToProbeParams(spec), mc);
  }
  WachterParams w;
  w.lambda_grid = spec.lambda3_grid;
  w.target_score = spec.target_score;
  w.step = spec.alpha;
  w.max_iters = spec.max_iters;
  w.cost = spec.cost;
  w.frozen = spec.frozen;
  w.noise = NoiseModel::Isotropic(spec.sigma2);
  if (spec.robust_target) {
    const double grad_norm = Norm2(score_model.Gradient(x));
    if (!(grad_norm > 0.0)) ThrowNumerical("undefined IR: vanishing gradient");
    w.target_score = RobustTargetScore(std::sqrt(spec.sigma2), grad_norm, spec.r);
  }
  return WachterGradient(score_model, x, w);
}

RecourseGenerator MakeGenerator(const LoadedModel& model,
                                const MethodSpec& spec) {
  spec.Validate(model);
  return [&model, spec](ConstSpan x, size_t row) {
    return RunMethod(model, x, spec, row);
  };
}

Json MethodSpecToJson(const MethodSpec& spec) {
  Json j = {{"method", spec.method},
            {"r", spec.r},
            {"sigma2", spec.sigma2},
            {"lambda1", spec.lambda1},
            {"lambda2", spec.lambda2},
            {"lambda3_grid", spec.lambda3_grid},
            {"alpha", spec.alpha},
            {"max_iters", spec.max_iters},
            {"cost", std::string(CostNormName(spec.cost))},
            {"target_score", spec.target_score},
            {"robust_target", spec.robust_target},
            {"seed", spec.seed}};
  if (spec.method == "probe-mc") {
    j["mc_samples"] = spec.mc_samples;
    j["temperature"] = spec.temperature;
  }
  return j;
}

std::optional<BoundCheck> BoundFor(const LoadedModel& model, ConstSpan x,
                                   const RecourseResult& result,
                                   double sigma2) {
  if (model.score_model() == nullptr) return std::nullopt;
  const BoundCheck check =
      CheckBound(*model.score_model(), x, result.x_check, std::sqrt(sigma2));
  if (!check.applicable) return std::nullopt;
  return check;
}

}  // namespace robrec
