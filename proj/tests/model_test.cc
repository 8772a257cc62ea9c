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

#include <cmath>
#include <limits>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "robrec/data.h"
#include "robrec/error.h"
#include "robrec/rng.h"

namespace robrec {
namespace {

MlpModel RandomMlp(Rng& rng, size_t d, size_t h) {
  auto draw = [&](size_t n, double scale) {
    Vector v(n);
    for (double& x : v) x = scale * rng.Normal();
    return v;
  };
  return MlpModel(d, h, draw(h * d, 1.0), draw(h, 0.5), draw(2 * h, 1.0),
                  draw(2, 0.5));
}

// Shortest distance from x to a ReLU kink of `m`.
double KinkDistance(const MlpModel& m, ConstSpan x) {
  const size_t d = m.dims();
  double best = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < m.hidden(); ++k) {
    const ConstSpan row = ConstSpan(m.hidden_weights()).subspan(k * d, d);
    const double pre = Dot(row, x) + m.hidden_bias()[k];
    best = std::min(best, std::abs(pre) / std::max(Norm2(row), 1e-300));
  }
  return best;
}

TEST(LinearModelTest, ScoreIsAffine) {
  const LinearModel m({1.0, 0.0}, 0.0);
  EXPECT_DOUBLE_EQ(m.Score(Vector{0.3, 0.9}), 0.3);
  const LinearModel boundary({1.0, 1.0}, -1.0);
  EXPECT_EQ(boundary.Score(Vector{0.5, 0.5}), 0.0);
  // Strict inequality: a zero score is unfavorable.
  EXPECT_EQ(boundary.Predict(Vector{0.5, 0.5}), 0);
}

TEST(LinearModelTest, GradientIsTheWeightVector) {
  const LinearModel m({2.0, -1.0}, 0.3);
  EXPECT_EQ(m.Gradient(Vector{0.1, 0.7}), (Vector{2.0, -1.0}));
  EXPECT_EQ(m.Gradient(Vector{0.9, 0.0}), (Vector{2.0, -1.0}));
}

TEST(LinearModelTest, PredictFollowsScoreSign) {
  const LinearModel m({1.0}, 0.0);
  EXPECT_EQ(m.Predict(Vector{0.7}), 1);
  EXPECT_EQ(m.Predict(Vector{-0.7}), 0);
}

TEST(ModelTest, DimensionMismatchThrows) {
  const LinearModel m({1.0, 2.0}, 0.0);
  EXPECT_THROW(m.Score(Vector{1.0}), Error);
  EXPECT_THROW(m.Gradient(Vector{1.0, 2.0, 3.0}), Error);
  EXPECT_THROW(m.Predict(Vector{}), Error);
}

TEST(MlpModelTest, ZeroOutputLayerScoresZero) {
  Rng rng(4);
  const MlpModel base = RandomMlp(rng, 3, 5);
  const MlpModel m(3, 5, base.hidden_weights(), base.hidden_bias(),
                   Vector(10, 0.0), Vector(2, 0.0));
  for (int i = 0; i < 20; ++i) {
    const Vector x = {rng.Uniform(), rng.Uniform(), rng.Uniform()};
    EXPECT_EQ(m.Score(x), 0.0);
    EXPECT_EQ(m.Predict(x), 0);
  }
}

TEST(MlpModelTest, GradientMatchesCentralDifferences) {
  Rng rng(2026);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const size_t d = 1 + rng.UniformIndex(5);
    const MlpModel m = RandomMlp(rng, d, 1 + rng.UniformIndex(8));
    Vector x(d);
    for (double& v : x) v = rng.Uniform();
    if (KinkDistance(m, x) < 1e-4) continue;
    const Vector g = m.Gradient(x);
    const double h = 1e-5;
    for (size_t j = 0; j < d; ++j) {
      Vector hi = x, lo = x;
      hi[j] += h;
      lo[j] -= h;
      const double fd = (m.Score(hi) - m.Score(lo)) / (2 * h);
      EXPECT_NEAR(g[j], fd, 1e-4) << "trial " << trial << " coord " << j;
    }
    ++checked;
  }
  EXPECT_GE(checked, 90);
}

TEST(MlpModelTest, InactiveUnitAtKinkContributesNothing) {
  // Unit 0 has pre-activation exactly 0 at x; unit 1 is active.
  const MlpModel m(2, 2, {1.0, 1.0, 0.5, -0.25}, {-1.0, 0.1},
                   {0.0, 0.0, 3.0, 2.0}, {0.0, 0.0});
  const Vector x = {0.5, 0.5};
  const Vector g = m.Gradient(x);
  // Only unit 1 contributes: (w2[1][1] - w2[0][1]) * w1[1] = 2 * (0.5, -0.25).
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_DOUBLE_EQ(g[1], -0.5);
}

TEST(TrainTest, LinearSeparatesBlobs) {
  const Dataset ds = Normalize(MakeBlobs(200, 0.1, 0.3, 5));
  const auto [train, test] = Split(ds, 0.2, 1);
  TrainConfig cfg;
  cfg.seed = 3;
  const auto model = Train(ModelKind::kLinear, train, cfg);
  EXPECT_EQ(model->kind(), "linear");
  // The generating line is a perfect separator by construction, so the
  // learned one should be close to perfect too.
  const Vector lo = {ds.norm_params[0].min, ds.norm_params[1].min};
  const Vector span = {ds.norm_params[0].max - lo[0],
                       ds.norm_params[1].max - lo[1]};
  size_t oracle_correct = 0;
  for (size_t i = 0; i < test.rows(); ++i) {
    const double raw = lo[0] + span[0] * test.features[i][0] + lo[1] +
                       span[1] * test.features[i][1];
    oracle_correct += (raw > 1.0 ? 1 : 0) == test.labels[i] ? 1 : 0;
  }
  EXPECT_EQ(oracle_correct, test.rows());
  EXPECT_GE(Accuracy(*model, test), 0.95);
}

double NearestNeighborAccuracy(const Dataset& train, const Dataset& test) {
  size_t correct = 0;
  for (size_t i = 0; i < test.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int label = 0;
    for (size_t t = 0; t < train.rows(); ++t) {
      const double d2 = Dot(Subtract(train.features[t], test.features[i]),
                            Subtract(train.features[t], test.features[i]));
      if (d2 < best) {
        best = d2;
        label = train.labels[t];
      }
    }
    correct += label == test.labels[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(test.rows());
}

TEST(TrainTest, MlpLearnsMoons) {
  const Dataset ds = Normalize(MakeMoons(500, 0.1, 8));
  const auto [train, test] = Split(ds, 0.2, 2);
  const double oracle = NearestNeighborAccuracy(train, test);
  ASSERT_GE(oracle, 0.95) << "fixture should be nearly separable";
  TrainConfig cfg;
  cfg.seed = 1;
  const auto model = Train(ModelKind::kMlp, train, cfg);
  const double acc = Accuracy(*model, test);
  EXPECT_GE(acc, 0.90);
  EXPECT_GE(acc, oracle - 0.08);
}

TEST(TrainTest, BitIdenticalGivenSeed) {
  const Dataset ds = Normalize(MakeMoons(120, 0.1, 8));
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.seed = 77;
  const auto a = Train(ModelKind::kMlp, ds, cfg);
  const auto b = Train(ModelKind::kMlp, ds, cfg);
  const auto& ma = dynamic_cast<const MlpModel&>(*a);
  const auto& mb = dynamic_cast<const MlpModel&>(*b);
  EXPECT_EQ(ma.hidden_weights(), mb.hidden_weights());
  EXPECT_EQ(ma.hidden_bias(), mb.hidden_bias());
  EXPECT_EQ(ma.output_weights(), mb.output_weights());
  EXPECT_EQ(ma.output_bias(), mb.output_bias());
  cfg.seed = 78;
  const auto c = Train(ModelKind::kMlp, ds, cfg);
  EXPECT_NE(dynamic_cast<const MlpModel&>(*c).hidden_weights(),
            ma.hidden_weights());
}

TEST(TrainTest, SingleClassIsRejected) {
  Dataset ds = Normalize(MakeBlobs(20, 0.1, 0.3, 1));
  for (int& y : ds.labels) y = 1;
  try {
    Train(ModelKind::kLinear, ds, TrainConfig{});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_THAT(e.what(), ::testing::HasSubstr("single-class training set"));
  }
}

TEST(TrainTest, ConfigRangesAreChecked) {
  TrainConfig cfg;
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = TrainConfig{};
  cfg.learning_rate = 0.0;
  EXPECT_THROW(cfg.Validate(), Error);
  EXPECT_EQ(TrainPreset("adult").batch_size, 512u);
  EXPECT_EQ(TrainPreset("gmc").learning_rate, 0.001);
  EXPECT_THROW(TrainPreset("mnist"), Error);
}

}  // namespace
}  // namespace robrec
