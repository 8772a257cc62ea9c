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

// Invalidation-rate (IR) estimators: the probability that a prescribed
// counterfactual x_check, implemented as x_check + eps, loses its favorable
// label.

#ifndef ROBREC_IR_H_
#define ROBREC_IR_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "robrec/forest.h"
#include "robrec/model.h"
#include "robrec/rng.h"
#include "robrec/vector_ops.h"

namespace robrec {

// Standard normal CDF, PDF and quantile. NormalCdf(+-inf) is exactly 1 / 0.
double NormalCdf(double z);
double NormalPdf(double z);
// Inverse CDF for p in (0, 1); +-inf at the endpoints.
double NormalQuantile(double p);

// Zero-mean response noise.
class NoiseModel {
 public:
  enum class Kind { kIsotropic, kDiagonal, kCustom };
  // Fills `out` with one noise vector drawn from `rng`.
  using Sampler = std::function<void(Rng&, std::span<double>)>;

  static NoiseModel Isotropic(double sigma2);
  static NoiseModel Diagonal(Vector variances);
  static NoiseModel Custom(std::string name, Sampler sampler);
  // Independent uniform noise on [-half_width, half_width] per feature.
  static NoiseModel UniformBox(double half_width);

  Kind kind() const { return kind_; }
  bool is_gaussian() const { return kind_ != Kind::kCustom; }
  const std::string& name() const { return name_; }

  // Per-feature variance; Gaussian kinds only.
  double Variance(size_t j) const;
  // g^T Sigma g; Gaussian kinds only.
  double QuadraticForm(ConstSpan g) const;
  // Isotropic sigma^2, or the largest diagonal variance.
  double MaxVariance() const;

  void Sample(Rng& rng, std::span<double> out) const;

  // Throws kInvalidArgument if the noise cannot act on d-dimensional inputs.
  void CheckDims(size_t d) const;

 private:
  NoiseModel(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  Kind kind_;
  std::string name_;
  double sigma2_ = 0.0;
  Vector variances_;
  Sampler sampler_;
};

// Monte-Carlo settings: K samples, sigmoid temperature t, seed.
struct McParams {
  size_t samples = 1000;
  double temperature = 100.0;
  uint64_t seed = 0;

  void Validate() const;
};

enum class Estimator { kFirstOrder, kMcHard, kMcSmoothed, kTreeExact };

Estimator ParseEstimator(std::string_view name);
std::string_view EstimatorName(Estimator e);

// First-order Gaussian IR 1 - Phi(f / sqrt(grad^T Sigma grad)), exact for
// linear scores.
struct FirstOrderIr {
  double ir = 0.0;
  double score = 0.0;
  // f / sqrt(grad^T Sigma grad)
  double z = 0.0;
  Vector score_gradient;
  // d ir / dx with the gradient in the denominator held fixed.
  Vector ir_gradient;
};

// Throws kNumerical ("undefined IR: vanishing gradient") if grad^T Sigma grad
// is zero, kInvalidArgument for non-Gaussian noise.
double IrFirstOrder(const ScoreModel& model, ConstSpan x,
                    const NoiseModel& noise);
FirstOrderIr IrFirstOrderWithGradient(const ScoreModel& model, ConstSpan x,
                                      const NoiseModel& noise);

// 1 - Phi(s / (sigma ||w||)): IR of the closed-form recourse reaching score s.
double IrWachterExact(const LinearModel& model, double target_score,
                      double sigma);

// (1/K) sum_k (1 - h(x + eps_k)).
double IrMcHard(const Classifier& model, ConstSpan x, const NoiseModel& noise,
                size_t samples, uint64_t seed);

// (1/K) sum_k (1 - S(t f(x + eps_k))) and its gradient in x. Draws the same
// eps_k as IrMcHard for equal (samples, seed).
struct SmoothedIr {
  double ir = 0.0;
  Vector gradient;
};
double IrMcSmoothed(const ScoreModel& model, ConstSpan x,
                    const NoiseModel& noise, const McParams& mc);
SmoothedIr IrMcSmoothedWithGradient(const ScoreModel& model, ConstSpan x,
                                    const NoiseModel& noise,
                                    const McParams& mc);

// Exact Gaussian mass of the label-0 cubes around x. Requires Gaussian noise
// with independent coordinates.
double IrTree(const RegionSet& regions, ConstSpan x, const NoiseModel& noise);
struct TreeIr {
  double ir = 0.0;
  Vector gradient;
};
TreeIr IrTreeWithGradient(const RegionSet& regions, ConstSpan x,
                          const NoiseModel& noise);

// Upper bound 1 / (4K) on the mean squared error of IrMcHard.
double McMseBound(size_t samples);

}  // namespace robrec

#endif  // ROBREC_IR_H_
