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

// Counterfactual search. Every generator starts from a factual x with
// h(x) = 0 and returns x_check = x + delta inside the unit box.
//
// The IR-targeting generators minimize
//
//   lambda1 * max(0, IR(x') - r) + lambda2 * max(0, s - f(x'))^2
//       + lambda3 * cost(x' - x)
//
// by proximal gradient descent (the cost term enters through its proximal
// map), stopping at the first iterate with IR <= r and h = 1. The last step
// is bisected so the returned point sits on that stopping boundary rather
// than up to one step beyond it.

#ifndef ROBREC_RECOURSE_H_
#define ROBREC_RECOURSE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robrec/forest.h"
#include "robrec/ir.h"
#include "robrec/model.h"
#include "robrec/vector_ops.h"

namespace robrec {

enum class CostNorm { kL1, kL2 };

CostNorm ParseCostNorm(std::string_view name);
std::string_view CostNormName(CostNorm cost);

struct RecourseResult {
  Vector x_check;
  Vector delta;
  double cost_l1 = 0.0;
  double cost_l2 = 0.0;
  // NaN when the generator has no IR estimate (e.g. closed-form Wachter
  // without a noise model).
  double predicted_ir = 0.0;
  bool valid = false;
  bool converged = false;
  size_t iterations = 0;
  std::string method;
  // Balance parameter of the branch that produced this result.
  double lambda = 0.0;
};

// Fills delta and both costs from x and x_check.
void FinalizeCosts(ConstSpan x, RecourseResult& result);

struct ProbeParams {
  double r = 0.35;
  NoiseModel noise = NoiseModel::Isotropic(0.01);
  double lambda1 = 2.0;
  double lambda2 = 1.0;
  std::vector<double> lambda3_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  double step = 0.05;
  size_t max_iters = 1000;
  CostNorm cost = CostNorm::kL1;
  double target_score = 0.0;
  // Optional per-feature mask; frozen features keep their factual value.
  std::vector<bool> frozen;

  void Validate(size_t dims) const;
};

struct WachterParams {
  std::vector<double> lambda_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  double target_score = 0.0;
  double step = 0.05;
  size_t max_iters = 1000;
  CostNorm cost = CostNorm::kL1;
  std::vector<bool> frozen;
  // When set, predicted_ir is the first-order IR under this noise.
  std::optional<NoiseModel> noise;

  void Validate(size_t dims) const;
};

// Gradient descent on (f(x') - s)^2 + lambda * cost for each lambda in the
// grid; returns the lowest-cost valid result (valid = false if none).
// Throws kFailedPrecondition if x is already favorable.
RecourseResult WachterGradient(const ScoreModel& model, ConstSpan x,
                               const WachterParams& params);

// x + ((s - f(x)) / ||w||^2) w. Not projected onto the box.
RecourseResult WachterClosedForm(const LinearModel& model, ConstSpan x,
                                 double target_score,
                                 const NoiseModel* noise = nullptr);

// sigma * ||grad|| * Phi^{-1}(1 - r): the closed-form target score whose
// recourse has IR exactly r under linear scores.
double RobustTargetScore(double sigma, double grad_norm, double r);

// IR-targeting search with the first-order Gaussian IR. Among converged
// lambda3 branches the minimum-L1 result wins (ties: smaller predicted IR,
// then smaller lambda3). Without a converged branch the best valid branch by
// predicted IR is returned with converged = false.
RecourseResult Probe(const ScoreModel& model, ConstSpan x,
                     const ProbeParams& params);

// Same search with the sigmoid-smoothed Monte-Carlo IR, which works for any
// noise sampler. Iteration i draws its samples from MixSeed(mc.seed, i).
RecourseResult ProbeMc(const ScoreModel& model, ConstSpan x,
                       const ProbeParams& params, const McParams& mc);

// Same search on a tree partition with the exact Gaussian region IR. The
// score-shortfall term becomes the squared distance to the nearest
// favorable region. Requires Gaussian noise with independent features.
RecourseResult ProbeTree(const RegionSet& regions, ConstSpan x,
                         const ProbeParams& params);

}  // namespace robrec

#endif  // ROBREC_RECOURSE_H_
