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


#include "robrec/analysis.h"

#include <charconv>
#include <cmath>
#include <sstream>

#include "robrec/error.h"
#include "robrec/rng.h"

namespace robrec {
namespace {

void CheckSigmaOmegaR(double sigma, double omega, double r) {
  if (!(sigma > 0.0)) ThrowInvalid("sigma must be > 0", "sigma2");
  if (!(omega > 0.0)) ThrowInvalid("omega must be > 0", "omega");
  if (!(r > 0.0 && r < 1.0)) ThrowInvalid("r must lie in (0, 1)", "r");
}

// Population mean and standard deviation.
std::pair<double, double> MeanStd(const std::vector<double>& values) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

std::string FormatNumber(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string FormatOptional(const std::optional<double>& v) {
  return v ? FormatNumber(*v) : std::string();
}

}  // namespace

BoundInputs BoundInputs::Make(double f_x, Vector grad_x, Vector grad_xc,
                              Vector delta, double sigma) {
  BoundInputs b;
  b.f_x = f_x;
  b.grad_x = std::move(grad_x);
  b.grad_xc = std::move(grad_xc);
  b.delta = std::move(delta);
  b.sigma = sigma;
  b.l0 = Norm0(b.delta, kL0Threshold);
  b.l1 = Norm1(b.delta);
  b.l2 = Norm2(b.delta);
  const double grad_norm = Norm2(b.grad_x);
  b.omega = grad_norm > 0.0 && b.l2 > 0.0
                ? Dot(b.grad_x, b.delta) / (grad_norm * b.l2)
                : 0.0;
  b.omega = std::clamp(b.omega, -1.0, 1.0);
  b.c = grad_norm > 0.0 && sigma > 0.0 ? f_x / (sigma * grad_norm) : 0.0;
  return b;
}

double CostForTarget(double f_x, double grad_norm, double sigma, double omega,
                     double r) {
  CheckSigmaOmegaR(sigma, omega, r);
  if (!(grad_norm > 0.0)) ThrowInvalid("gradient norm must be > 0", "grad_norm");
  const double c = f_x / (sigma * grad_norm);
  return (sigma / omega) * (NormalQuantile(1.0 - r) - c);
}

double TradeoffDerivative(double sigma, double omega, double r) {
  CheckSigmaOmegaR(sigma, omega, r);
  return (sigma / omega) / NormalPdf(NormalQuantile(1.0 - r));
}

double IrUpperBound(const BoundInputs& b) {
  if (b.l0 == 0) ThrowInvalid("bound undefined for delta = 0", "delta");
  if (!(b.omega > 0.0)) ThrowInvalid("bound requires omega > 0", "omega");
  if (!(b.sigma > 0.0)) ThrowInvalid("sigma must be > 0", "sigma2");
  const double gx = Norm2(b.grad_x);
  const double gxc = Norm2(b.grad_xc);
  if (!(gx > 0.0) || !(gxc > 0.0)) {
    ThrowNumerical("undefined IR: vanishing gradient");
  }
  const double shift = (b.omega / b.sigma) * (gx / gxc) *
                       (b.l1 / std::sqrt(static_cast<double>(b.l0)));
  return 1.0 - NormalCdf(b.c + shift);
}

double LinearizedIr(const BoundInputs& b) {
  if (!(b.sigma > 0.0)) ThrowInvalid("sigma must be > 0", "sigma2");
  const double gxc = Norm2(b.grad_xc);
  if (!(gxc > 0.0)) ThrowNumerical("undefined IR: vanishing gradient");
  return 1.0 - NormalCdf((b.f_x + Dot(b.grad_x, b.delta)) / (b.sigma * gxc));
}

BoundCheck CheckBound(const ScoreModel& model, ConstSpan x, ConstSpan x_check,
                      double sigma) {
  Vector grad_x(model.dims());
  Vector grad_xc(model.dims());
  const double f_x = model.ScoreAndGradientUnchecked(x, grad_x);
  model.ScoreAndGradientUnchecked(x_check, grad_xc);
  const BoundInputs b = BoundInputs::Make(f_x, std::move(grad_x),
                                          std::move(grad_xc),
                                          Subtract(x_check, x), sigma);
  BoundCheck check;
  check.omega = b.omega;
  if (!(b.omega > 0.0) || b.l0 == 0 || !(Norm2(b.grad_xc) > 0.0)) return check;
  check.applicable = true;
  check.upper_bound = IrUpperBound(b);
  check.linearized_ir = LinearizedIr(b);
  check.violated = check.upper_bound < check.linearized_ir - kBoundTolerance;
  return check;
}

std::vector<size_t> NegativeRows(const Classifier& model, const Dataset& test) {
  std::vector<size_t> rows;
  for (size_t i = 0; i < test.rows(); ++i) {
    if (model.Predict(test.features[i]) == 0) rows.push_back(i);
  }
  return rows;
}

EvalReport Evaluate(const Classifier& model, const Dataset& test,
                    const RecourseGenerator& generator,
                    const NoiseModel& noise, const EvalOptions& options) {
  if (options.samples < 1) ThrowInvalid("k must be >= 1", "k");
  std::vector<size_t> rows = NegativeRows(model, test);
  if (rows.empty()) ThrowPrecondition("no negatively predicted instances");
  if (options.max_instances > 0 && rows.size() > options.max_instances) {
    rows.resize(options.max_instances);
  }
  const auto* score_model = dynamic_cast<const ScoreModel*>(&model);

  EvalReport report;
  report.n_instances = rows.size();
  std::vector<double> irs;
  std::vector<double> costs;
  for (size_t row : rows) {
    const Vector& x = test.features[row];
    RecourseResult result;
    try {
      result = generator(x, row);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kNumerical) throw;
      throw Error(ErrorCode::kNumerical,
                  std::string(err.what()) + " (instance " +
                      std::to_string(row) + ")");
    }
    if (result.converged) ++report.n_converged;
    // Validity is judged on the evaluated model itself.
    if (model.Predict(result.x_check) != 1) continue;
    ++report.n_valid;
    irs.push_back(IrMcHard(model, result.x_check, noise, options.samples,
                           MixSeed(options.seed, row)));
    costs.push_back(result.cost_l1);
    if (score_model != nullptr && options.bound_sigma > 0.0) {
      const BoundCheck check =
          CheckBound(*score_model, x, result.x_check, options.bound_sigma);
      if (!check.applicable) {
        ++report.bound_excluded;
      } else {
        ++report.bound_checked;
        if (check.violated) ++report.bound_violations;
      }
    }
  }
  report.recourse_accuracy = static_cast<double>(report.n_valid) /
                             static_cast<double>(report.n_instances);
  if (!irs.empty()) {
    const auto [air_mean, air_std] = MeanStd(irs);
    const auto [cost_mean, cost_std] = MeanStd(costs);
    report.air_mean = air_mean;
    report.air_std = air_std;
    report.cost_mean = cost_mean;
    report.cost_std = cost_std;
  }
  return report;
}

std::vector<EvalReport> ParetoSweep(const Classifier& model,
                                    const Dataset& test,
                                    const std::vector<double>& r_values,
                                    const std::vector<double>& sigma2_values,
                                    const GeneratorFactory& factory,
                                    const EvalOptions& options,
                                    const std::string& method) {
  if (r_values.empty()) ThrowInvalid("r grid is empty", "r_values");
  if (sigma2_values.empty()) ThrowInvalid("sigma2 grid is empty", "sigma2_values");
  std::vector<EvalReport> reports;
  for (double sigma2 : sigma2_values) {
    const NoiseModel noise = NoiseModel::Isotropic(sigma2);
    for (double r : r_values) {
      EvalOptions cell = options;
      if (cell.bound_sigma > 0.0) cell.bound_sigma = std::sqrt(sigma2);
      EvalReport report =
          Evaluate(model, test, factory(r, sigma2), noise, cell);
      report.method = method;
      report.r = r;
      report.sigma2 = sigma2;
      reports.push_back(std::move(report));
    }
  }
  return reports;
}

std::string FormatReportCsv(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << "method,r,sigma2,RA,AIR_mean,AIR_std,AC_mean,AC_std,violations\n";
  for (const auto& rep : reports) {
    out << rep.method << ',' << FormatNumber(rep.r) << ','
        << FormatNumber(rep.sigma2) << ',' << FormatNumber(rep.recourse_accuracy)
        << ',' << FormatOptional(rep.air_mean) << ','
        << FormatOptional(rep.air_std) << ',' << FormatOptional(rep.cost_mean)
        << ',' << FormatOptional(rep.cost_std) << ',' << rep.bound_violations
        << '\n';
  }
  return out.str();
}

}  // namespace robrec
