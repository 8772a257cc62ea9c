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


// Cost and robustness analysis of recourse: closed-form cost for a target
// invalidation rate, its sensitivity, the l1/l0 upper bound on the
// linearized IR, and test-set evaluation (RA / AIR / AC) with Pareto sweeps.

#ifndef ROBREC_ANALYSIS_H_
#define ROBREC_ANALYSIS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "robrec/data.h"
#include "robrec/ir.h"
#include "robrec/model.h"
#include "robrec/recourse.h"
#include "robrec/vector_ops.h"

namespace robrec {

// Entries of delta with magnitude at or below this count as unchanged.
inline constexpr double kL0Threshold = 1e-6;

struct BoundInputs {
  double f_x = 0.0;
  Vector grad_x;
  Vector grad_xc;
  Vector delta;
  double sigma = 0.0;

  // Derived by Make().
  double omega = 0.0;  // cosine between grad_x and delta
  double c = 0.0;      // f_x / (sigma ||grad_x||)
  size_t l0 = 0;
  double l1 = 0.0;
  double l2 = 0.0;

  // omega is 0 when delta or grad_x vanishes.
  static BoundInputs Make(double f_x, Vector grad_x, Vector grad_xc,
                          Vector delta, double sigma);
};

// (sigma / omega) (Phi^{-1}(1 - r) - c) with c = f_x / (sigma grad_norm):
// the l2 action needed by a linear classifier to reach IR r.
double CostForTarget(double f_x, double grad_norm, double sigma, double omega,
                     double r);

// d cost / d (1 - r) = (sigma / omega) / phi(Phi^{-1}(1 - r)).
double TradeoffDerivative(double sigma, double omega, double r);

// 1 - Phi(c + (omega / sigma) (||grad_x|| / ||grad_xc||) ||delta||_1 /
// sqrt(||delta||_0)).
double IrUpperBound(const BoundInputs& b);

// 1 - Phi((f_x + grad_x . delta) / (sigma ||grad_xc||)), the quantity the
// upper bound dominates.
double LinearizedIr(const BoundInputs& b);

struct BoundCheck {
  // False when omega <= 0 or delta = 0; such instances are excluded.
  bool applicable = false;
  double omega = 0.0;
  double upper_bound = 0.0;
  double linearized_ir = 0.0;
  bool violated = false;
};

// Slack allowed for rounding when comparing the bound with the linearized IR.
inline constexpr double kBoundTolerance = 1e-12;

BoundCheck CheckBound(const ScoreModel& model, ConstSpan x, ConstSpan x_check,
                      double sigma);

// Produces recourse for the test instance with the given row index.
using RecourseGenerator =
    std::function<RecourseResult(ConstSpan x, size_t row)>;

struct EvalOptions {
  // Samples per instance for the empirical (hard Monte-Carlo) IR.
  size_t samples = 10000;
  uint64_t seed = 0;
  // 0 means every negatively predicted instance.
  size_t max_instances = 0;
  // Sigma for bound checks; bounds are skipped when 0 or the model has no
  // score.
  double bound_sigma = 0.0;
};

struct EvalReport {
  std::string method;
  double r = 0.0;
  double sigma2 = 0.0;
  double recourse_accuracy = 0.0;
  // Absent when no result is valid.
  std::optional<double> air_mean;
  std::optional<double> air_std;
  std::optional<double> cost_mean;
  std::optional<double> cost_std;
  size_t n_instances = 0;
  size_t n_valid = 0;
  size_t n_converged = 0;
  size_t bound_checked = 0;
  size_t bound_excluded = 0;
  size_t bound_violations = 0;
};

// Rows of the test set that `model` predicts unfavorably, in order.
std::vector<size_t> NegativeRows(const Classifier& model, const Dataset& test);

// Runs `generator` on every negatively predicted instance. The empirical IR
// of instance row i is measured on `model` with seed MixSeed(seed, i).
// Throws kFailedPrecondition when there is no negative instance.
EvalReport Evaluate(const Classifier& model, const Dataset& test,
                    const RecourseGenerator& generator,
                    const NoiseModel& noise, const EvalOptions& options);

// Builds the generator for one (r, sigma2) cell of a sweep.
using GeneratorFactory =
    std::function<RecourseGenerator(double r, double sigma2)>;

// One report per (sigma2, r) cell, sigma2-major in input order.
std::vector<EvalReport> ParetoSweep(const Classifier& model,
                                    const Dataset& test,
                                    const std::vector<double>& r_values,
                                    const std::vector<double>& sigma2_values,
                                    const GeneratorFactory& factory,
                                    const EvalOptions& options,
                                    const std::string& method);

// Header "method,r,sigma2,RA,AIR_mean,AIR_std,AC_mean,AC_std,violations" and
// one line per report. Absent statistics are written as empty cells.
std::string FormatReportCsv(const std::vector<EvalReport>& reports);

}  // namespace robrec

#endif  // ROBREC_ANALYSIS_H_
