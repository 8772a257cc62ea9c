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

#include "robrec/recourse.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robrec/error.h"
#include "robrec/rng.h"

namespace robrec {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// The score-shortfall term aims this far above the target score so descent
// crosses the target in finitely many steps; bisection then lands on the
// target itself.
constexpr double kScoreMargin = 1e-3;
// Same idea for trees, in input units: the distance term pulls toward a
// point this far inside the open side of a favorable cube.
constexpr double kInteriorMargin = 1e-6;
constexpr int kBisectionSteps = 60;

// One evaluation of the smooth part of an objective at an iterate.
struct Evaluation {
  bool stop = false;
  double ir = kNaN;
  Vector gradient;
};

struct BranchSettings {
  double step;
  size_t max_iters;
  double lambda;
  CostNorm cost;
  const std::vector<bool>* frozen;
};

struct BranchOutcome {
  Vector x;
  bool converged = false;
  size_t iterations = 0;
};

void ProxCost(ConstSpan origin, double threshold, CostNorm cost, Vector& y) {
  if (threshold <= 0.0) return;
  if (cost == CostNorm::kL1) {
    for (size_t j = 0; j < y.size(); ++j) {
      const double delta = y[j] - origin[j];
      const double shrunk = std::max(0.0, std::abs(delta) - threshold);
      y[j] = origin[j] + std::copysign(shrunk, delta);
    }
    return;
  }
  Vector delta = Subtract(y, origin);
  const double norm = Norm2(delta);
  const double scale = norm > threshold ? 1.0 - threshold / norm : 0.0;
  for (size_t j = 0; j < y.size(); ++j) y[j] = origin[j] + scale * delta[j];
}

void ProjectFeasible(ConstSpan origin, const std::vector<bool>* frozen,
                     Vector& y) {
  for (size_t j = 0; j < y.size(); ++j) {
    if (frozen != nullptr && !frozen->empty() && (*frozen)[j]) {
      y[j] = origin[j];
    } else {
      y[j] = std::clamp(y[j], 0.0, 1.0);
    }
  }
}

// Proximal gradient descent from `origin`. `eval(x, iter)` returns the
// smooth gradient and the stop test at x; `stop(x, iter)` is the same stop
// test alone, used to bisect the step that first satisfies it. A kNumerical
// error from `eval` ends the branch unconverged.
template <typename Eval, typename Stop>
BranchOutcome RunBranch(ConstSpan origin, const BranchSettings& settings,
                        Eval&& eval, Stop&& stop) {
  BranchOutcome out;
  out.x.assign(origin.begin(), origin.end());
  ProjectFeasible(origin, settings.frozen, out.x);
  for (size_t it = 0; it < settings.max_iters; ++it) {
    Evaluation e;
    try {
      e = eval(out.x, it);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kNumerical) throw;
      out.iterations = it;
      return out;
    }
    if (e.stop) {
      out.converged = true;
      out.iterations = it;
      return out;
    }
    Vector y = out.x;
    for (size_t j = 0; j < y.size(); ++j) y[j] -= settings.step * e.gradient[j];
    ProxCost(origin, settings.step * settings.lambda, settings.cost, y);
    ProjectFeasible(origin, settings.frozen, y);
    if (y == out.x) {
      out.iterations = it;
      return out;
    }
    if (stop(y, it)) {
      double lo = 0.0, hi = 1.0;
      for (int b = 0; b < kBisectionSteps; ++b) {
        const double mid = 0.5 * (lo + hi);
        if (stop(Lerp(out.x, y, mid), it)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      out.x = Lerp(out.x, y, hi);
      out.converged = true;
      out.iterations = it + 1;
      return out;
    }
    out.x = std::move(y);
  }
  out.iterations = settings.max_iters;
  return out;
}

// d/dx lambda2 * max(0, target - f)^2 = -2 lambda2 max(0, target - f) grad f
void AddShortfallGradient(double lambda2, double target, double score,
                          ConstSpan score_gradient, Vector& gradient) {
  const double shortfall = target - score;
  if (shortfall <= 0.0 || lambda2 == 0.0) return;
  for (size_t j = 0; j < gradient.size(); ++j) {
    gradient[j] -= 2.0 * lambda2 * shortfall * score_gradient[j];
  }
}

void CheckPoint(ConstSpan x, size_t dims) {
  if (x.size() != dims) {
    ThrowInvalid("dimension mismatch: point has " + std::to_string(x.size()) +
                     " features, expected " + std::to_string(dims),
                 "features");
  }
  for (double v : x) {
    if (!std::isfinite(v)) ThrowInvalid("point has non-finite entries", "features");
  }
}

void CheckFrozen(const std::vector<bool>& frozen, size_t dims) {
  if (!frozen.empty() && frozen.size() != dims) {
    ThrowInvalid("frozen mask has wrong length", "frozen");
  }
}

void CheckDescent(double step, size_t max_iters) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    ThrowInvalid("step size alpha must be > 0", "alpha");
  }
  if (max_iters < 1) ThrowInvalid("max_iters must be >= 1", "max_iters");
}

void CheckGrid(const std::vector<double>& grid, const char* field) {
  if (grid.empty()) ThrowInvalid("balance grid is empty", field);
  for (double v : grid) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      ThrowInvalid("balance parameters must be >= 0", field);
    }
  }
}

// Converged first; then valid; then lower L1 (converged) or lower predicted
// IR (unconverged); then smaller predicted IR / L1; then smaller lambda.
bool Better(const RecourseResult& a, const RecourseResult& b) {
  if (a.converged != b.converged) return a.converged;
  if (a.valid != b.valid) return a.valid;
  const double a_ir = std::isnan(a.predicted_ir) ? 1.0 : a.predicted_ir;
  const double b_ir = std::isnan(b.predicted_ir) ? 1.0 : b.predicted_ir;
  if (a.converged) {
    if (a.cost_l1 != b.cost_l1) return a.cost_l1 < b.cost_l1;
    if (a_ir != b_ir) return a_ir < b_ir;
  } else {
    if (a_ir != b_ir) return a_ir < b_ir;
    if (a.cost_l1 != b.cost_l1) return a.cost_l1 < b.cost_l1;
  }
  return a.lambda < b.lambda;
}

template <typename Branch>
RecourseResult BestOverGrid(const std::vector<double>& grid, Branch&& branch) {
  std::optional<RecourseResult> best;
  for (double lambda : grid) {
    RecourseResult candidate = branch(lambda);
    if (!best || Better(candidate, *best)) best = std::move(candidate);
  }
  return *best;
}

void RequireUnfavorable(const Classifier& model, ConstSpan x) {
  if (model.PredictUnchecked(x) == 1) {
    ThrowPrecondition("input already favorable");
  }
}

}  // namespace

CostNorm ParseCostNorm(std::string_view name) {
  if (name == "l1") return CostNorm::kL1;
  if (name == "l2") return CostNorm::kL2;
  ThrowInvalid("unknown cost '" + std::string(name) + "' (expected l1|l2)",
               "cost");
}

std::string_view CostNormName(CostNorm cost) {
  return cost == CostNorm::kL1 ? "l1" : "l2";
}

void FinalizeCosts(ConstSpan x, RecourseResult& result) {
  result.delta = Subtract(result.x_check, x);
  result.cost_l1 = Norm1(result.delta);
  result.cost_l2 = Norm2(result.delta);
}

void ProbeParams::Validate(size_t dims) const {
  if (!(r > 0.0 && r < 1.0)) ThrowInvalid("r must lie in (0, 1)", "r");
  noise.CheckDims(dims);
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) {
    ThrowInvalid("lambda1 and lambda2 must be >= 0", "lambda1");
  }
  CheckGrid(lambda3_grid, "lambda3_grid");
  CheckDescent(step, max_iters);
  if (!std::isfinite(target_score)) {
    ThrowInvalid("target score must be finite", "target_score");
  }
  CheckFrozen(frozen, dims);
}

void WachterParams::Validate(size_t dims) const {
  CheckGrid(lambda_grid, "lambda3_grid");
  CheckDescent(step, max_iters);
  if (!std::isfinite(target_score)) {
    ThrowInvalid("target score must be finite", "target_score");
  }
  CheckFrozen(frozen, dims);
  if (noise) noise->CheckDims(dims);
}

RecourseResult WachterGradient(const ScoreModel& model, ConstSpan x,
                               const WachterParams& params) {
  CheckPoint(x, model.dims());
  params.Validate(model.dims());
  RequireUnfavorable(model, x);
  const double s = params.target_score;
  Vector grad(model.dims());

  auto stop = [&](const Vector& p, size_t) {
    const double f = model.ScoreUnchecked(p);
    return f >= s && f > 0.0;
  };
  auto eval = [&](const Vector& p, size_t) {
    Evaluation e;
    const double f = model.ScoreAndGradientUnchecked(p, grad);
    e.stop = f >= s && f > 0.0;
    e.gradient.resize(grad.size());
    const double residual = 2.0 * (f - (s + kScoreMargin));
    for (size_t j = 0; j < grad.size(); ++j) e.gradient[j] = residual * grad[j];
    return e;
  };

  return BestOverGrid(params.lambda_grid, [&](double lambda) {
    const BranchSettings settings{params.step, params.max_iters, lambda,
                                  params.cost, &params.frozen};
    BranchOutcome branch = RunBranch(x, settings, eval, stop);
    RecourseResult result;
    result.x_check = std::move(branch.x);
    result.iterations = branch.iterations;
    result.valid = model.PredictUnchecked(result.x_check) == 1;
    result.converged = branch.converged;
    result.method = "wachter";
    result.lambda = lambda;
    result.predicted_ir = kNaN;
    if (params.noise) {
      try {
        result.predicted_ir =
            IrFirstOrder(model, result.x_check, *params.noise);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::kNumerical) throw;
      }
    }
    FinalizeCosts(x, result);
    return result;
  });
}

RecourseResult WachterClosedForm(const LinearModel& model, ConstSpan x,
                                 double target_score,
                                 const NoiseModel* noise) {
  CheckPoint(x, model.dims());
  const Vector& w = model.weights();
  const double norm2 = Dot(w, w);
  if (!(norm2 > 0.0)) ThrowInvalid("zero weight vector", "model");
  const double scale = (target_score - model.ScoreUnchecked(x)) / norm2;
  RecourseResult result;
  result.x_check.resize(x.size());
  for (size_t j = 0; j < x.size(); ++j) result.x_check[j] = x[j] + scale * w[j];
  result.valid = model.ScoreUnchecked(result.x_check) > 0.0;
  result.converged = result.valid;
  result.method = "wachter_closed_form";
  result.predicted_ir =
      noise != nullptr ? IrFirstOrder(model, result.x_check, *noise) : kNaN;
  FinalizeCosts(x, result);
  return result;
}

double RobustTargetScore(double sigma, double grad_norm, double r) {
  if (!(sigma > 0.0)) ThrowInvalid("sigma must be > 0", "sigma2");
  if (!(grad_norm > 0.0)) ThrowInvalid("gradient norm must be > 0");
  if (!(r > 0.0 && r < 1.0)) ThrowInvalid("r must lie in (0, 1)", "r");
  return sigma * grad_norm * NormalQuantile(1.0 - r);
}

RecourseResult Probe(const ScoreModel& model, ConstSpan x,
                     const ProbeParams& params) {
  CheckPoint(x, model.dims());
  params.Validate(model.dims());
  if (!params.noise.is_gaussian()) {
    ThrowInvalid("probe needs Gaussian noise; use probe-mc for custom noise",
                 "noise");
  }
  RequireUnfavorable(model, x);
  const double target = params.target_score + kScoreMargin;

  auto stop = [&](const Vector& p, size_t) {
    try {
      const FirstOrderIr fo = IrFirstOrderWithGradient(model, p, params.noise);
      return fo.ir <= params.r && fo.score > 0.0;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kNumerical) throw;
      return false;
    }
  };
  auto eval = [&](const Vector& p, size_t) {
    const FirstOrderIr fo = IrFirstOrderWithGradient(model, p, params.noise);
    Evaluation e;
    e.ir = fo.ir;
    e.stop = fo.ir <= params.r && fo.score > 0.0;
    e.gradient.assign(p.size(), 0.0);
    if (fo.ir > params.r) {
      for (size_t j = 0; j < p.size(); ++j) {
        e.gradient[j] += params.lambda1 * fo.ir_gradient[j];
      }
    }
    AddShortfallGradient(params.lambda2, target, fo.score, fo.score_gradient,
                         e.gradient);
    return e;
  };

  return BestOverGrid(params.lambda3_grid, [&](double lambda) {
    const BranchSettings settings{params.step, params.max_iters, lambda,
                                  params.cost, &params.frozen};
    BranchOutcome branch = RunBranch(x, settings, eval, stop);
    RecourseResult result;
    result.x_check = std::move(branch.x);
    result.iterations = branch.iterations;
    result.valid = model.PredictUnchecked(result.x_check) == 1;
    result.method = "probe";
    result.lambda = lambda;
    try {
      result.predicted_ir = IrFirstOrder(model, result.x_check, params.noise);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kNumerical) throw;
      result.predicted_ir = kNaN;
    }
    result.converged = branch.converged;
    FinalizeCosts(x, result);
    return result;
  });
}

RecourseResult ProbeMc(const ScoreModel& model, ConstSpan x,
                       const ProbeParams& params, const McParams& mc) {
  CheckPoint(x, model.dims());
  params.Validate(model.dims());
  mc.Validate();
  RequireUnfavorable(model, x);
  const double target = params.target_score + kScoreMargin;
  auto iteration_mc = [&](size_t it) {
    McParams step_mc = mc;
    step_mc.seed = MixSeed(mc.seed, it);
    return step_mc;
  };
  Vector grad(model.dims());

  auto stop = [&](const Vector& p, size_t it) {
    if (!(model.ScoreUnchecked(p) > 0.0)) return false;
    return IrMcSmoothed(model, p, params.noise, iteration_mc(it)) <= params.r;
  };
  auto eval = [&](const Vector& p, size_t it) {
    const SmoothedIr smoothed =
        IrMcSmoothedWithGradient(model, p, params.noise, iteration_mc(it));
    const double f = model.ScoreAndGradientUnchecked(p, grad);
    Evaluation e;
    e.ir = smoothed.ir;
    e.stop = smoothed.ir <= params.r && f > 0.0;
    e.gradient.assign(p.size(), 0.0);
    if (smoothed.ir > params.r) {
      for (size_t j = 0; j < p.size(); ++j) {
        e.gradient[j] += params.lambda1 * smoothed.gradient[j];
      }
    }
    AddShortfallGradient(params.lambda2, target, f, grad, e.gradient);
    return e;
  };

  return BestOverGrid(params.lambda3_grid, [&](double lambda) {
    const BranchSettings settings{params.step, params.max_iters, lambda,
                                  params.cost, &params.frozen};
    BranchOutcome branch = RunBranch(x, settings, eval, stop);
    RecourseResult result;
    result.x_check = std::move(branch.x);
    result.iterations = branch.iterations;
    result.valid = model.PredictUnchecked(result.x_check) == 1;
    result.method = "probe-mc";
    result.lambda = lambda;
    // The estimate that decided the stop (or the last iterate's draw).
    const size_t last = branch.converged && branch.iterations > 0
                            ? branch.iterations - 1
                            : branch.iterations;
    result.predicted_ir =
        IrMcSmoothed(model, result.x_check, params.noise, iteration_mc(last));
    result.converged = branch.converged;
    FinalizeCosts(x, result);
    return result;
  });
}

RecourseResult ProbeTree(const RegionSet& regions, ConstSpan x,
                         const ProbeParams& params) {
  CheckPoint(x, regions.dims());
  params.Validate(regions.dims());
  if (!params.noise.is_gaussian()) {
    ThrowInvalid("probe-tree needs Gaussian noise", "noise");
  }
  if (regions.Label(x) == 1) ThrowPrecondition("input already favorable");
  const size_t d = regions.dims();

  // Favorable cubes clipped to the unit box, with the open lower side pulled
  // slightly inward so the nearest point is inside the cube.
  struct Target {
    Vector lo, hi;
  };
  std::vector<Target> targets;
  for (const auto& cube : regions.cubes()) {
    if (cube.label != 1) continue;
    Target t{Vector(d), Vector(d)};
    bool empty = false;
    for (size_t j = 0; j < d; ++j) {
      t.lo[j] = std::max(cube.lower[j] + kInteriorMargin, 0.0);
      t.hi[j] = std::min(cube.upper[j], 1.0);
      if (t.lo[j] > t.hi[j]) empty = true;
    }
    if (!empty) targets.push_back(std::move(t));
  }
  auto nearest_favorable = [&](const Vector& p) -> std::optional<Vector> {
    std::optional<Vector> best;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const auto& t : targets) {
      Vector q(d);
      double d2 = 0.0;
      for (size_t j = 0; j < d; ++j) {
        q[j] = std::clamp(p[j], t.lo[j], t.hi[j]);
        d2 += (p[j] - q[j]) * (p[j] - q[j]);
      }
      if (d2 < best_d2) {
        best_d2 = d2;
        best = std::move(q);
      }
    }
    return best;
  };

  auto stop = [&](const Vector& p, size_t) {
    return regions.Label(p) == 1 && IrTree(regions, p, params.noise) <= params.r;
  };
  auto eval = [&](const Vector& p, size_t) {
    const TreeIr tree_ir = IrTreeWithGradient(regions, p, params.noise);
    Evaluation e;
    e.ir = tree_ir.ir;
    e.stop = tree_ir.ir <= params.r && regions.Label(p) == 1;
    e.gradient.assign(d, 0.0);
    if (tree_ir.ir > params.r) {
      for (size_t j = 0; j < d; ++j) {
        e.gradient[j] += params.lambda1 * tree_ir.gradient[j];
      }
    }
    if (const auto q = nearest_favorable(p); q && params.lambda2 > 0.0) {
      for (size_t j = 0; j < d; ++j) {
        e.gradient[j] += 2.0 * params.lambda2 * (p[j] - (*q)[j]);
      }
    }
    return e;
  };

  return BestOverGrid(params.lambda3_grid, [&](double lambda) {
    const BranchSettings settings{params.step, params.max_iters, lambda,
                                  params.cost, &params.frozen};
    BranchOutcome branch = RunBranch(x, settings, eval, stop);
    RecourseResult result;
    result.x_check = std::move(branch.x);
    result.iterations = branch.iterations;
    result.valid = regions.Label(result.x_check) == 1;
    result.method = "probe-tree";
    result.lambda = lambda;
    result.predicted_ir = IrTree(regions, result.x_check, params.noise);
    result.converged = branch.converged;
    FinalizeCosts(x, result);
    return result;
  });
}

}  // namespace robrec
