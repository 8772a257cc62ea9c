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

#include "robrec/ir.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "robrec/error.h"

namespace robrec {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double Logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// P(a < Z <= b) for standard normal Z, evaluated on whichever tail keeps
// precision.
double IntervalMass(double a, double b) {
  if (a > 0.0) return NormalCdf(-a) - NormalCdf(-b);
  return NormalCdf(b) - NormalCdf(a);
}

}  // namespace

double NormalCdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double NormalPdf(double z) {
  if (std::isinf(z)) return 0.0;
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double NormalQuantile(double p) {
  if (!(p >= 0.0 && p <= 1.0)) ThrowInvalid("quantile needs p in [0, 1]");
  if (p == 0.0) return -kInf;
  if (p == 1.0) return kInf;
  // Acklam's rational approximation (relative error ~1e-9), refined by one
  // Halley step against the erfc-based CDF.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  double x;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - kLow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement. The residual Phi(x) - p is formed on the smaller tail.
  const double e = x < 0.0 ? NormalCdf(x) - p : (1.0 - p) - NormalCdf(-x);
  const double u =
      e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

NoiseModel NoiseModel::Isotropic(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    ThrowInvalid("sigma2 must be > 0", "sigma2");
  }
  NoiseModel noise(Kind::kIsotropic, "isotropic");
  noise.sigma2_ = sigma2;
  return noise;
}

NoiseModel NoiseModel::Diagonal(Vector variances) {
  if (variances.empty()) ThrowInvalid("sigma_diag is empty", "sigma_diag");
  for (double v : variances) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      ThrowInvalid("every diagonal variance must be > 0", "sigma_diag");
    }
  }
  NoiseModel noise(Kind::kDiagonal, "diagonal");
  noise.variances_ = std::move(variances);
  return noise;
}

NoiseModel NoiseModel::Custom(std::string name, Sampler sampler) {
  if (!sampler) ThrowInvalid("custom noise needs a sampler");
  NoiseModel noise(Kind::kCustom, std::move(name));
  noise.sampler_ = std::move(sampler);
  return noise;
}

NoiseModel NoiseModel::UniformBox(double half_width) {
  if (!(half_width > 0.0)) ThrowInvalid("half_width must be > 0");
  return Custom("uniform_box", [half_width](Rng& rng, std::span<double> out) {
    for (double& v : out) v = rng.Uniform(-half_width, half_width);
  });
}

double NoiseModel::Variance(size_t j) const {
  switch (kind_) {
    case Kind::kIsotropic:
      return sigma2_;
    case Kind::kDiagonal:
      return variances_.at(j);
    case Kind::kCustom:
      break;
  }
  ThrowInvalid("custom noise has no closed-form variance", "noise");
}

double NoiseModel::QuadraticForm(ConstSpan g) const {
  double q = 0.0;
  for (size_t j = 0; j < g.size(); ++j) q += g[j] * g[j] * Variance(j);
  return q;
}

double NoiseModel::MaxVariance() const {
  if (kind_ == Kind::kIsotropic) return sigma2_;
  if (kind_ == Kind::kDiagonal) {
    return *std::max_element(variances_.begin(), variances_.end());
  }
  ThrowInvalid("custom noise has no closed-form variance", "noise");
}

void NoiseModel::Sample(Rng& rng, std::span<double> out) const {
  switch (kind_) {
    case Kind::kIsotropic: {
      const double sigma = std::sqrt(sigma2_);
      for (double& v : out) v = sigma * rng.Normal();
      return;
    }
    case Kind::kDiagonal:
      for (size_t j = 0; j < out.size(); ++j) {
        out[j] = std::sqrt(variances_[j]) * rng.Normal();
      }
      return;
    case Kind::kCustom:
      sampler_(rng, out);
      return;
  }
}

void NoiseModel::CheckDims(size_t d) const {
  if (kind_ == Kind::kDiagonal && variances_.size() != d) {
    ThrowInvalid("sigma_diag has " + std::to_string(variances_.size()) +
                     " entries, expected " + std::to_string(d),
                 "sigma_diag");
  }
}

void McParams::Validate() const {
  if (samples < 1) ThrowInvalid("K must be >= 1", "k");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    ThrowInvalid("temperature must be > 0", "temperature");
  }
}

Estimator ParseEstimator(std::string_view name) {
  if (name == "first_order") return Estimator::kFirstOrder;
  if (name == "mc_hard") return Estimator::kMcHard;
  if (name == "mc_smoothed") return Estimator::kMcSmoothed;
  if (name == "tree_exact") return Estimator::kTreeExact;
  ThrowInvalid("unknown estimator '" + std::string(name) +
                   "' (expected first_order|mc_hard|mc_smoothed|tree_exact)",
               "estimator");
}

std::string_view EstimatorName(Estimator e) {
  switch (e) {
    case Estimator::kFirstOrder:
      return "first_order";
    case Estimator::kMcHard:
      return "mc_hard";
    case Estimator::kMcSmoothed:
      return "mc_smoothed";
    case Estimator::kTreeExact:
      return "tree_exact";
  }
  return "unknown";
}

FirstOrderIr IrFirstOrderWithGradient(const ScoreModel& model, ConstSpan x,
                                      const NoiseModel& noise) {
  if (!noise.is_gaussian()) {
    ThrowInvalid("first-order IR requires Gaussian noise", "noise");
  }
  noise.CheckDims(model.dims());
  FirstOrderIr out;
  out.score_gradient = model.Gradient(x);
  out.score = model.ScoreUnchecked(x);
  const double q = noise.QuadraticForm(out.score_gradient);
  if (!(q > 0.0)) ThrowNumerical("undefined IR: vanishing gradient");
  const double scale = std::sqrt(q);
  out.z = out.score / scale;
  out.ir = NormalCdf(-out.z);
  const double dir = -NormalPdf(out.z) / scale;
  out.ir_gradient.resize(out.score_gradient.size());
  for (size_t j = 0; j < out.score_gradient.size(); ++j) {
    out.ir_gradient[j] = dir * out.score_gradient[j];
  }
  return out;
}

double IrFirstOrder(const ScoreModel& model, ConstSpan x,
                    const NoiseModel& noise) {
  return IrFirstOrderWithGradient(model, x, noise).ir;
}

double IrWachterExact(const LinearModel& model, double target_score,
                      double sigma) {
  if (!(sigma > 0.0)) ThrowInvalid("sigma must be > 0", "sigma2");
  const double norm = Norm2(model.weights());
  if (!(norm > 0.0)) ThrowInvalid("zero weight vector", "model");
  return NormalCdf(-target_score / (sigma * norm));
}

double IrMcHard(const Classifier& model, ConstSpan x, const NoiseModel& noise,
                size_t samples, uint64_t seed) {
  if (samples < 1) ThrowInvalid("K must be >= 1", "k");
  if (x.size() != model.dims()) {
    ThrowInvalid("dimension mismatch", "features");
  }
  noise.CheckDims(model.dims());
  Rng rng(seed);
  Vector eps(x.size()), point(x.size());
  size_t flips = 0;
  for (size_t k = 0; k < samples; ++k) {
    noise.Sample(rng, eps);
    for (size_t j = 0; j < x.size(); ++j) point[j] = x[j] + eps[j];
    flips += model.PredictUnchecked(point) == 0 ? 1 : 0;
  }
  return static_cast<double>(flips) / static_cast<double>(samples);
}

SmoothedIr IrMcSmoothedWithGradient(const ScoreModel& model, ConstSpan x,
                                    const NoiseModel& noise,
                                    const McParams& mc) {
  mc.Validate();
  if (x.size() != model.dims()) {
    ThrowInvalid("dimension mismatch", "features");
  }
  noise.CheckDims(model.dims());
  const size_t d = x.size();
  Rng rng(mc.seed);
  Vector eps(d), point(d), grad(d);
  SmoothedIr out;
  out.gradient.assign(d, 0.0);
  double sum = 0.0;
  for (size_t k = 0; k < mc.samples; ++k) {
    noise.Sample(rng, eps);
    for (size_t j = 0; j < d; ++j) point[j] = x[j] + eps[j];
    const double f = model.ScoreAndGradientUnchecked(point, grad);
    const double s = Logistic(mc.temperature * f);
    sum += 1.0 - s;
    // d/dx (1 - S(t f)) = -t S (1 - S) grad f
    const double w = -mc.temperature * s * (1.0 - s);
    if (w != 0.0) {
      for (size_t j = 0; j < d; ++j) out.gradient[j] += w * grad[j];
    }
  }
  const double inv_k = 1.0 / static_cast<double>(mc.samples);
  out.ir = sum * inv_k;
  for (double& g : out.gradient) g *= inv_k;
  return out;
}

double IrMcSmoothed(const ScoreModel& model, ConstSpan x,
                    const NoiseModel& noise, const McParams& mc) {
  mc.Validate();
  if (x.size() != model.dims()) {
    ThrowInvalid("dimension mismatch", "features");
  }
  noise.CheckDims(model.dims());
  Rng rng(mc.seed);
  Vector eps(x.size()), point(x.size());
  double sum = 0.0;
  for (size_t k = 0; k < mc.samples; ++k) {
    noise.Sample(rng, eps);
    for (size_t j = 0; j < x.size(); ++j) point[j] = x[j] + eps[j];
    sum += 1.0 - Logistic(mc.temperature * model.ScoreUnchecked(point));
  }
  return sum / static_cast<double>(mc.samples);
}

TreeIr IrTreeWithGradient(const RegionSet& regions, ConstSpan x,
                          const NoiseModel& noise) {
  if (!noise.is_gaussian()) {
    ThrowInvalid("tree IR requires Gaussian noise with independent features",
                 "noise");
  }
  if (x.size() != regions.dims()) {
    ThrowInvalid("dimension mismatch", "features");
  }
  noise.CheckDims(regions.dims());
  const size_t d = x.size();
  Vector sigma(d);
  for (size_t j = 0; j < d; ++j) sigma[j] = std::sqrt(noise.Variance(j));

  TreeIr out;
  out.gradient.assign(d, 0.0);
  Vector mass, dmass;
  for (const auto& cube : regions.cubes()) {
    if (cube.label != 0) continue;
    const auto& active = cube.active_features;
    mass.resize(active.size());
    dmass.resize(active.size());
    double product = 1.0;
    for (size_t a = 0; a < active.size(); ++a) {
      const size_t j = active[a];
      const double lo = (cube.lower[j] - x[j]) / sigma[j];
      const double hi = (cube.upper[j] - x[j]) / sigma[j];
      mass[a] = IntervalMass(lo, hi);
      dmass[a] = -(NormalPdf(hi) - NormalPdf(lo)) / sigma[j];
      product *= mass[a];
    }
    out.ir += product;
    for (size_t a = 0; a < active.size(); ++a) {
      double partial = dmass[a];
      for (size_t b = 0; b < active.size(); ++b) {
        if (b != a) partial *= mass[b];
      }
      out.gradient[active[a]] += partial;
    }
  }
  out.ir = std::clamp(out.ir, 0.0, 1.0);
  return out;
}

double IrTree(const RegionSet& regions, ConstSpan x, const NoiseModel& noise) {
  return IrTreeWithGradient(regions, x, noise).ir;
}

double McMseBound(size_t samples) {
  if (samples < 1) ThrowInvalid("K must be >= 1", "k");
  return 1.0 / (4.0 * static_cast<double>(samples));
}

}  // namespace robrec
