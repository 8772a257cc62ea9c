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

#include "robrec/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "robrec/error.h"
#include "robrec/rng.h"

namespace robrec {
namespace {

void CheckDims(ConstSpan x, size_t expected) {
  if (x.size() != expected) {
    ThrowInvalid("dimension mismatch: point has " + std::to_string(x.size()) +
                     " features, model expects " + std::to_string(expected),
                 "features");
  }
}

// Numerically stable logistic function.
double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void CheckBothClasses(const Dataset& ds) {
  if (ds.rows() == 0) ThrowInvalid("empty training set");
  const bool has0 =
      std::find(ds.labels.begin(), ds.labels.end(), 0) != ds.labels.end();
  const bool has1 =
      std::find(ds.labels.begin(), ds.labels.end(), 1) != ds.labels.end();
  if (!has0 || !has1) ThrowInvalid("single-class training set");
}

std::vector<std::vector<size_t>> EpochBatches(size_t n, size_t batch_size,
                                              Rng& rng) {
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  rng.Shuffle(std::span<size_t>(order));
  std::vector<std::vector<size_t>> batches;
  for (size_t start = 0; start < n; start += batch_size) {
    const size_t end = std::min(n, start + batch_size);
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  return batches;
}

std::shared_ptr<const ScoreModel> TrainLinear(const Dataset& ds,
                                              const TrainConfig& cfg) {
  const size_t d = ds.dims();
  Rng rng(cfg.seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(d));
  Vector w(d);
  for (double& v : w) v = rng.Uniform(-bound, bound);
  double b = rng.Uniform(-bound, bound);

  Vector grad_w(d);
  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& batch : EpochBatches(ds.rows(), cfg.batch_size, rng)) {
      std::fill(grad_w.begin(), grad_w.end(), 0.0);
      double grad_b = 0.0;
      for (size_t i : batch) {
        const auto& x = ds.features[i];
        const double residual = Sigmoid(Dot(w, x) + b) - ds.labels[i];
        for (size_t j = 0; j < d; ++j) grad_w[j] += residual * x[j];
        grad_b += residual;
      }
      const double step =
          cfg.learning_rate / static_cast<double>(batch.size());
      for (size_t j = 0; j < d; ++j) w[j] -= step * grad_w[j];
      b -= step * grad_b;
    }
  }
  return std::make_shared<LinearModel>(std::move(w), b);
}

std::shared_ptr<const ScoreModel> TrainMlp(const Dataset& ds,
                                           const TrainConfig& cfg) {
  const size_t d = ds.dims();
  const size_t h = cfg.hidden_units;
  Rng rng(cfg.seed);

  Vector w1(h * d), b1(h), w2(2 * h), b2(2);
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(d));
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(h));
  for (double& v : w1) v = rng.Uniform(-bound1, bound1);
  for (double& v : b1) v = rng.Uniform(-bound1, bound1);
  for (double& v : w2) v = rng.Uniform(-bound2, bound2);
  for (double& v : b2) v = rng.Uniform(-bound2, bound2);

  Vector g_w1(h * d), g_b1(h), g_w2(2 * h), g_b2(2);
  Vector pre(h), act(h);
  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& batch : EpochBatches(ds.rows(), cfg.batch_size, rng)) {
      std::fill(g_w1.begin(), g_w1.end(), 0.0);
      std::fill(g_b1.begin(), g_b1.end(), 0.0);
      std::fill(g_w2.begin(), g_w2.end(), 0.0);
      std::fill(g_b2.begin(), g_b2.end(), 0.0);
      for (size_t i : batch) {
        const auto& x = ds.features[i];
        for (size_t k = 0; k < h; ++k) {
          pre[k] = b1[k] + Dot(ConstSpan(w1).subspan(k * d, d), x);
          act[k] = pre[k] > 0.0 ? pre[k] : 0.0;
        }
        const double out0 = b2[0] + Dot(ConstSpan(w2).subspan(0, h), act);
        const double out1 = b2[1] + Dot(ConstSpan(w2).subspan(h, h), act);
        // Softmax cross-entropy: dL/dout1 = p1 - y, dL/dout0 = -(p1 - y).
        const double delta = Sigmoid(out1 - out0) - ds.labels[i];
        g_b2[0] -= delta;
        g_b2[1] += delta;
        for (size_t k = 0; k < h; ++k) {
          g_w2[k] -= delta * act[k];
          g_w2[h + k] += delta * act[k];
          if (pre[k] <= 0.0) continue;
          const double back = delta * (w2[h + k] - w2[k]);
          g_b1[k] += back;
          for (size_t j = 0; j < d; ++j) g_w1[k * d + j] += back * x[j];
        }
      }
      const double step =
          cfg.learning_rate / static_cast<double>(batch.size());
      for (size_t q = 0; q < w1.size(); ++q) w1[q] -= step * g_w1[q];
      for (size_t q = 0; q < b1.size(); ++q) b1[q] -= step * g_b1[q];
      for (size_t q = 0; q < w2.size(); ++q) w2[q] -= step * g_w2[q];
      for (size_t q = 0; q < b2.size(); ++q) b2[q] -= step * g_b2[q];
    }
  }
  return std::make_shared<MlpModel>(d, h, std::move(w1), std::move(b1),
                                    std::move(w2), std::move(b2));
}

}  // namespace

int Classifier::Predict(ConstSpan x) const {
  CheckDims(x, dims());
  return PredictUnchecked(x);
}

double ScoreModel::Score(ConstSpan x) const {
  CheckDims(x, dims());
  return ScoreUnchecked(x);
}

Vector ScoreModel::Gradient(ConstSpan x) const {
  CheckDims(x, dims());
  Vector g(dims());
  ScoreAndGradientUnchecked(x, g);
  return g;
}

LinearModel::LinearModel(Vector weights, double bias)
    : weights_(std::move(weights)), bias_(bias) {
  if (weights_.empty()) ThrowInvalid("linear model needs at least 1 weight");
}

double LinearModel::ScoreAndGradientUnchecked(ConstSpan x,
                                              std::span<double> out) const {
  std::copy(weights_.begin(), weights_.end(), out.begin());
  return ScoreUnchecked(x);
}

MlpModel::MlpModel(size_t input_dims, size_t hidden, Vector hidden_weights,
                   Vector hidden_bias, Vector output_weights,
                   Vector output_bias)
    : input_dims_(input_dims),
      hidden_(hidden),
      hidden_weights_(std::move(hidden_weights)),
      hidden_bias_(std::move(hidden_bias)),
      output_weights_(std::move(output_weights)),
      output_bias_(std::move(output_bias)) {
  if (input_dims_ == 0 || hidden_ == 0) {
    ThrowInvalid("mlp dimensions must be positive");
  }
  if (hidden_weights_.size() != hidden_ * input_dims_ ||
      hidden_bias_.size() != hidden_ || output_weights_.size() != 2 * hidden_ ||
      output_bias_.size() != 2) {
    ThrowInvalid("mlp parameter arrays have inconsistent sizes");
  }
}

double MlpModel::ScoreUnchecked(ConstSpan x) const {
  const size_t d = input_dims_;
  double out0 = output_bias_[0];
  double out1 = output_bias_[1];
  for (size_t k = 0; k < hidden_; ++k) {
    const double pre =
        hidden_bias_[k] + Dot(ConstSpan(hidden_weights_).subspan(k * d, d), x);
    if (pre <= 0.0) continue;
    out0 += output_weights_[k] * pre;
    out1 += output_weights_[hidden_ + k] * pre;
  }
  return out1 - out0;
}

double MlpModel::ScoreAndGradientUnchecked(ConstSpan x,
                                           std::span<double> out) const {
  const size_t d = input_dims_;
  std::fill(out.begin(), out.end(), 0.0);
  double score = output_bias_[1] - output_bias_[0];
  for (size_t k = 0; k < hidden_; ++k) {
    ConstSpan row = ConstSpan(hidden_weights_).subspan(k * d, d);
    const double pre = hidden_bias_[k] + Dot(row, x);
    // ReLU subgradient at exactly 0 is 0.
    if (pre <= 0.0) continue;
    const double v = output_weights_[hidden_ + k] - output_weights_[k];
    score += v * pre;
    for (size_t j = 0; j < d; ++j) out[j] += v * row[j];
  }
  return score;
}

ModelKind ParseModelKind(std::string_view name) {
  if (name == "linear") return ModelKind::kLinear;
  if (name == "mlp") return ModelKind::kMlp;
  ThrowInvalid("unknown model kind '" + std::string(name) +
                   "' (expected linear|mlp)",
               "kind");
}

void TrainConfig::Validate() const {
  if (batch_size < 1) ThrowInvalid("batch_size must be >= 1", "batch_size");
  if (epochs < 1) ThrowInvalid("epochs must be >= 1", "epochs");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    ThrowInvalid("learning_rate must be > 0", "learning_rate");
  }
  if (hidden_units < 1) {
    ThrowInvalid("hidden_units must be >= 1", "hidden_units");
  }
}

TrainConfig TrainPreset(std::string_view name) {
  TrainConfig cfg;
  if (name == "adult") {
    cfg.batch_size = 512;
    cfg.epochs = 50;
    cfg.learning_rate = 0.002;
  } else if (name == "compas") {
    cfg.batch_size = 32;
    cfg.epochs = 40;
    cfg.learning_rate = 0.002;
  } else if (name == "gmc") {
    cfg.batch_size = 64;
    cfg.epochs = 30;
    cfg.learning_rate = 0.001;
  } else if (name != "synthetic") {
    ThrowInvalid("unknown training preset '" + std::string(name) + "'",
                 "preset");
  }
  return cfg;
}

std::shared_ptr<const ScoreModel> Train(ModelKind kind, const Dataset& train,
                                        const TrainConfig& cfg) {
  cfg.Validate();
  CheckBothClasses(train);
  switch (kind) {
    case ModelKind::kLinear:
      return TrainLinear(train, cfg);
    case ModelKind::kMlp:
      return TrainMlp(train, cfg);
  }
  ThrowInvalid("unknown model kind");
}

double Accuracy(const Classifier& model, const Dataset& ds) {
  if (ds.rows() == 0) return 0.0;
  size_t correct = 0;
  for (size_t i = 0; i < ds.rows(); ++i) {
    correct += model.Predict(ds.features[i]) == ds.labels[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(ds.rows());
}

}  // namespace robrec
