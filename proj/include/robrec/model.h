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

#ifndef ROBREC_MODEL_H_
#define ROBREC_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "robrec/data.h"
#include "robrec/vector_ops.h"

namespace robrec {

// Anything producing hard labels h(x) in {0, 1}.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual size_t dims() const = 0;
  // Unchecked label; callers guarantee x.size() == dims().
  virtual int PredictUnchecked(ConstSpan x) const = 0;

  int Predict(ConstSpan x) const;
};

// Differentiable logit score f with h(x) = 1[f(x) > 0].
class ScoreModel : public Classifier {
 public:
  virtual std::string_view kind() const = 0;

  // Unchecked variants for inner loops.
  virtual double ScoreUnchecked(ConstSpan x) const = 0;
  // Writes the gradient of the score into `out` (size dims()) and returns the
  // score at x.
  virtual double ScoreAndGradientUnchecked(ConstSpan x,
                                           std::span<double> out) const = 0;

  int PredictUnchecked(ConstSpan x) const final {
    return ScoreUnchecked(x) > 0.0 ? 1 : 0;
  }

  // Checked entry points; throw kInvalidArgument on dimension mismatch.
  double Score(ConstSpan x) const;
  Vector Gradient(ConstSpan x) const;
};

class LinearModel final : public ScoreModel {
 public:
  LinearModel(Vector weights, double bias);

  std::string_view kind() const override { return "linear"; }
  size_t dims() const override { return weights_.size(); }
  double ScoreUnchecked(ConstSpan x) const override {
    return Dot(weights_, x) + bias_;
  }
  double ScoreAndGradientUnchecked(ConstSpan x,
                                   std::span<double> out) const override;

  const Vector& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  Vector weights_;
  double bias_;
};

// One hidden ReLU layer and a two-way softmax head. The exposed score is the
// logit difference (class 1 minus class 0), so 1[f > 0] is the argmax.
class MlpModel final : public ScoreModel {
 public:
  // Row-major: hidden_weights is hidden x d, output_weights is 2 x hidden.
  MlpModel(size_t input_dims, size_t hidden, Vector hidden_weights,
           Vector hidden_bias, Vector output_weights, Vector output_bias);

  std::string_view kind() const override { return "mlp"; }
  size_t dims() const override { return input_dims_; }
  size_t hidden() const { return hidden_; }
  double ScoreUnchecked(ConstSpan x) const override;
  double ScoreAndGradientUnchecked(ConstSpan x,
                                   std::span<double> out) const override;

  const Vector& hidden_weights() const { return hidden_weights_; }
  const Vector& hidden_bias() const { return hidden_bias_; }
  const Vector& output_weights() const { return output_weights_; }
  const Vector& output_bias() const { return output_bias_; }

 private:
  size_t input_dims_;
  size_t hidden_;
  Vector hidden_weights_;
  Vector hidden_bias_;
  Vector output_weights_;
  Vector output_bias_;
};

enum class ModelKind { kLinear, kMlp };

ModelKind ParseModelKind(std::string_view name);

struct TrainConfig {
  size_t batch_size = 32;
  size_t epochs = 300;
  double learning_rate = 0.1;
  uint64_t seed = 0;
  size_t hidden_units = 50;

  // Throws kInvalidArgument when a field is out of range.
  void Validate() const;
};

// Batch size, epochs and learning rate used for the tabular benchmarks
// ("adult", "compas", "gmc"); the seed is left at its default.
TrainConfig TrainPreset(std::string_view name);

// Minibatch SGD on the cross-entropy loss, without momentum. Initial weights
// are uniform in +-1/sqrt(fan_in). Deterministic given cfg.seed.
std::shared_ptr<const ScoreModel> Train(ModelKind kind, const Dataset& train,
                                        const TrainConfig& cfg);

double Accuracy(const Classifier& model, const Dataset& ds);

}  // namespace robrec

#endif  // ROBREC_MODEL_H_
