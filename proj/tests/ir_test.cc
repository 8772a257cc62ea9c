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

#include <cmath>
#include <limits>

#include "gtest/gtest.h"
#include "robrec/error.h"
#include "robrec/forest.h"
#include "robrec/model.h"
#include "robrec/rng.h"
#include "test_util.h"

namespace robrec {
namespace {

using testing::ReferenceNormalCdf;
using testing::ReferenceQuantile;

constexpr double kInf = std::numeric_limits<double>::infinity();

// A classifier with a constant label, for degenerate MC cases.
class ConstantClassifier final : public Classifier {
 public:
  ConstantClassifier(size_t d, int label) : d_(d), label_(label) {}
  size_t dims() const override { return d_; }
  int PredictUnchecked(ConstSpan) const override { return label_; }

 private:
  size_t d_;
  int label_;
};

Tree DepthOneTree() {
  std::vector<TreeNode> nodes(3);
  nodes[0] = {0, 0.5, 1, 2, 0};
  nodes[1].label = 0;
  nodes[2].label = 1;
  return Tree(2, nodes, 0);
}

TEST(NormalCdfTest, MatchesSeriesOracle) {
  EXPECT_EQ(NormalCdf(0.0), 0.5);
  EXPECT_NEAR(NormalCdf(1.0), ReferenceNormalCdf(1.0), 1e-12);
  EXPECT_NEAR(NormalCdf(1.0), 0.8413447460685429, 1e-12);
  EXPECT_NEAR(NormalCdf(-2.0), 0.0227501319481792, 1e-12);
  EXPECT_NEAR(NormalCdf(-2.0), 1.0 - NormalCdf(2.0), 1e-15);
  for (double z = -8.0; z <= 8.0; z += 0.137) {
    EXPECT_NEAR(NormalCdf(z), ReferenceNormalCdf(z), 1e-7) << z;
  }
  EXPECT_EQ(NormalCdf(kInf), 1.0);
  EXPECT_EQ(NormalCdf(-kInf), 0.0);
  EXPECT_EQ(NormalPdf(kInf), 0.0);
}

TEST(NormalQuantileTest, InvertsTheCdf) {
  for (double p : {1e-9, 1e-4, 0.02, 0.15866, 0.3, 0.5, 0.77, 0.99, 1 - 1e-7}) {
    EXPECT_NEAR(NormalQuantile(p), ReferenceQuantile(p), 1e-8) << p;
  }
  EXPECT_EQ(NormalQuantile(0.5), 0.0);
  EXPECT_EQ(NormalQuantile(0.0), -kInf);
  EXPECT_EQ(NormalQuantile(1.0), kInf);
  EXPECT_THROW(NormalQuantile(1.5), Error);
}

TEST(IrFirstOrderTest, LinearWorkedExample) {
  const LinearModel m({1.0, 0.0}, 0.0);
  const double ir = IrFirstOrder(m, Vector{0.1, 0.4}, NoiseModel::Isotropic(0.01));
  EXPECT_NEAR(ir, 1.0 - ReferenceNormalCdf(1.0), 1e-10);
  EXPECT_NEAR(ir, 0.15866, 1e-5);
}

TEST(IrFirstOrderTest, BoundaryAndLimit) {
  const LinearModel on_boundary({1.0, 1.0}, -1.0);
  EXPECT_EQ(IrFirstOrder(on_boundary, Vector{0.5, 0.5},
                         NoiseModel::Isotropic(0.04)),
            0.5);
  const LinearModel far({1.0, 1.0}, 1e6);
  EXPECT_EQ(IrFirstOrder(far, Vector{0.5, 0.5}, NoiseModel::Isotropic(0.04)),
            0.0);
}

TEST(IrFirstOrderTest, VanishingGradientIsAnError) {
  const LinearModel flat({0.0, 0.0}, 1.0);
  try {
    IrFirstOrder(flat, Vector{0.1, 0.2}, NoiseModel::Isotropic(0.01));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumerical);
    EXPECT_STREQ(e.what(), "undefined IR: vanishing gradient");
  }
  EXPECT_THROW(IrFirstOrder(LinearModel({1.0}, 0.0), Vector{0.1},
                            NoiseModel::UniformBox(0.1)),
               Error);
}

TEST(IrFirstOrderTest, DiagonalNoiseUsesQuadraticForm) {
  const LinearModel m({3.0, 4.0}, -1.0);
  const Vector x = {0.3, 0.2};
  const double q = 9 * 0.01 + 16 * 0.04;
  EXPECT_NEAR(IrFirstOrder(m, x, NoiseModel::Diagonal({0.01, 0.04})),
              1.0 - ReferenceNormalCdf(m.Score(x) / std::sqrt(q)), 1e-10);
}

TEST(IrFirstOrderTest, ScaleInvarianceAndMonotonicity) {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const LinearModel m = testing::RandomLinear(rng, 4);
    const Vector x = testing::UniformPoint(rng, 4);
    const double c = rng.Uniform(0.1, 10.0);
    Vector w = m.weights();
    for (double& v : w) v *= c;
    const LinearModel scaled(w, m.bias() * c);
    const NoiseModel noise = NoiseModel::Isotropic(0.02);
    EXPECT_NEAR(IrFirstOrder(m, x, noise), IrFirstOrder(scaled, x, noise), 1e-12);
  }
  const LinearModel m({1.0, 2.0}, 0.0);
  double prev = 1.0;
  for (double b = -1.0; b <= 1.0; b += 0.1) {
    const double ir =
        IrFirstOrder(LinearModel({1.0, 2.0}, b), Vector{0.1, 0.1},
                     NoiseModel::Isotropic(0.05));
    EXPECT_LT(ir, prev);
    prev = ir;
  }
  prev = 0.0;
  for (double s2 = 0.001; s2 < 0.2; s2 *= 1.5) {
    const double ir = IrFirstOrder(m, Vector{0.2, 0.1}, NoiseModel::Isotropic(s2));
    EXPECT_GT(ir, prev);
    prev = ir;
  }
}

TEST(IrFirstOrderTest, GradientMatchesFiniteDifferencesForLinear) {
  const LinearModel m({0.7, -1.3, 0.4}, 0.1);
  const Vector x = {0.3, 0.1, 0.8};
  const NoiseModel noise = NoiseModel::Isotropic(0.03);
  const FirstOrderIr fo = IrFirstOrderWithGradient(m, x, noise);
  for (size_t j = 0; j < 3; ++j) {
    Vector hi = x, lo = x;
    hi[j] += 1e-6;
    lo[j] -= 1e-6;
    const double fd = (IrFirstOrder(m, hi, noise) - IrFirstOrder(m, lo, noise)) / 2e-6;
    EXPECT_NEAR(fo.ir_gradient[j], fd, 1e-6);
  }
}

TEST(IrWachterExactTest, ClosedFormValues) {
  const LinearModel unit({1.0, 0.0}, 0.3);
  EXPECT_EQ(IrWachterExact(unit, 0.0, 0.4), 0.5);
  EXPECT_NEAR(IrWachterExact(unit, 0.1, 0.1), 1.0 - ReferenceNormalCdf(1.0), 1e-12);
  const LinearModel two({0.0, 2.0}, 0.0);
  EXPECT_NEAR(IrWachterExact(two, 0.2, 0.1), 1.0 - ReferenceNormalCdf(1.0), 1e-12);
  EXPECT_THROW(IrWachterExact(LinearModel({0.0}, 0.0), 0.1, 0.1), Error);
}

TEST(IrMcHardTest, DegenerateModels) {
  const ConstantClassifier yes(2, 1), no(2, 0);
  const NoiseModel noise = NoiseModel::Isotropic(0.01);
  for (size_t k : {1u, 7u, 100u}) {
    EXPECT_EQ(IrMcHard(yes, Vector{0.5, 0.5}, noise, k, 3), 0.0);
    EXPECT_EQ(IrMcHard(no, Vector{0.5, 0.5}, noise, k, 3), 1.0);
  }
}

TEST(IrMcHardTest, ConvergesToClosedFormAndIsSeeded) {
  const LinearModel m({1.0, 0.0}, 0.0);
  const Vector x = {0.1, 0.5};
  const NoiseModel noise = NoiseModel::Isotropic(0.01);
  const double mc = IrMcHard(m, x, noise, 100000, 42);
  EXPECT_NEAR(mc, 1.0 - ReferenceNormalCdf(1.0), 0.01);
  EXPECT_EQ(mc, IrMcHard(m, x, noise, 100000, 42));
  const double k = 100.0;
  const double v = IrMcHard(m, x, noise, 100, 1) * k;
  EXPECT_EQ(v, std::round(v));
}

TEST(IrMcSmoothedTest, ZeroScoreGivesOneHalf) {
  const LinearModel zero({0.0, 0.0}, 0.0);
  for (double t : {0.5, 10.0, 1000.0}) {
    EXPECT_DOUBLE_EQ(IrMcSmoothed(zero, Vector{0.2, 0.3},
                                  NoiseModel::Isotropic(0.01), {200, t, 1}),
                     0.5);
  }
}

TEST(IrMcSmoothedTest, ApproachesHardEstimateAsTemperatureGrows) {
  const LinearModel m({1.0, 0.5}, -0.2);
  const Vector x = {0.3, 0.2};  // f = 0.2
  const NoiseModel noise = NoiseModel::Isotropic(0.0025);
  const double hard = IrMcHard(m, x, noise, 10000, 8);
  double previous_gap = kInf;
  for (double t : {1.0, 10.0, 100.0, 1000.0}) {
    const double gap = std::abs(IrMcSmoothed(m, x, noise, {10000, t, 8}) - hard);
    EXPECT_LE(gap, previous_gap + 1e-12) << t;
    previous_gap = gap;
  }
  EXPECT_LE(previous_gap, 0.005);
  // The hard limit is reached exactly once every sample has margin >= 1e-3.
  EXPECT_NEAR(IrMcSmoothed(m, Vector{0.9, 0.9}, noise, {1000, 1e7, 8}),
              IrMcHard(m, Vector{0.9, 0.9}, noise, 1000, 8), 1e-6);
}

TEST(IrMcSmoothedTest, GradientMatchesFiniteDifferences) {
  const LinearModel m({1.0, -0.5}, 0.05);
  const Vector x = {0.2, 0.3};
  const NoiseModel noise = NoiseModel::Isotropic(0.01);
  const McParams mc{500, 20.0, 17};
  const SmoothedIr s = IrMcSmoothedWithGradient(m, x, noise, mc);
  EXPECT_DOUBLE_EQ(s.ir, IrMcSmoothed(m, x, noise, mc));
  for (size_t j = 0; j < 2; ++j) {
    Vector hi = x, lo = x;
    hi[j] += 1e-6;
    lo[j] -= 1e-6;
    const double fd =
        (IrMcSmoothed(m, hi, noise, mc) - IrMcSmoothed(m, lo, noise, mc)) / 2e-6;
    EXPECT_NEAR(s.gradient[j], fd, 1e-5);
  }
}

TEST(IrTreeTest, DepthOneWorkedExample) {
  const RegionSet rs = ExtractRegions(DepthOneTree());
  const NoiseModel noise = NoiseModel::Isotropic(0.01);
  EXPECT_NEAR(IrTree(rs, Vector{0.7, 0.3}, noise), ReferenceNormalCdf(-2.0), 1e-12);
  EXPECT_NEAR(IrTree(rs, Vector{0.5, 0.3}, noise), 0.5, 1e-15);
}

TEST(IrTreeTest, SingleFavorableLeafHasZeroIr) {
  std::vector<TreeNode> leaf(1);
  leaf[0].label = 1;
  const RegionSet rs = ExtractRegions(Tree(3, leaf, 0));
  EXPECT_EQ(IrTree(rs, Vector{0.1, 0.5, 0.9}, NoiseModel::Isotropic(0.3)), 0.0);
}

TEST(IrTreeTest, AgreesWithMonteCarloOnRandomTrees) {
  Rng rng(314);
  for (int i = 0; i < 20; ++i) {
    const Tree t = testing::RandomTree(rng, 3, 1 + static_cast<int>(rng.UniformIndex(3)));
    const RegionSet rs = ExtractRegions(t);
    const Vector x = testing::UniformPoint(rng, 3, 0.2, 0.8);
    const NoiseModel noise = NoiseModel::Diagonal({0.01, 0.02, 0.005});
    const double exact = IrTree(rs, x, noise);
    const double mc = IrMcHard(t, x, noise, 100000, 1000 + i);
    EXPECT_NEAR(exact, mc, 0.01) << "tree " << i;
    EXPECT_NEAR(IrTree(rs.Flipped(), x, noise), 1.0 - exact, 1e-12);
    EXPECT_GE(exact, 0.0);
    EXPECT_LE(exact, 1.0);
  }
}

TEST(IrTreeTest, GradientMatchesFiniteDifferences) {
  Rng rng(2);
  const Tree t = testing::RandomTree(rng, 2, 3);
  const RegionSet rs = ExtractRegions(t);
  const NoiseModel noise = NoiseModel::Isotropic(0.02);
  const Vector x = {0.45, 0.55};
  const TreeIr g = IrTreeWithGradient(rs, x, noise);
  for (size_t j = 0; j < 2; ++j) {
    Vector hi = x, lo = x;
    hi[j] += 1e-6;
    lo[j] -= 1e-6;
    EXPECT_NEAR(g.gradient[j], (IrTree(rs, hi, noise) - IrTree(rs, lo, noise)) / 2e-6,
                1e-6);
  }
  EXPECT_THROW(IrTree(rs, x, NoiseModel::UniformBox(0.1)), Error);
}

TEST(McMseBoundTest, FormulaAndEmpiricalCheck) {
  EXPECT_EQ(McMseBound(1), 0.25);
  EXPECT_EQ(McMseBound(100), 0.0025);
  EXPECT_THROW(McMseBound(0), Error);
  const LinearModel m({1.0, 0.0}, 0.0);
  const Vector x = {0.05, 0.5};
  const NoiseModel noise = NoiseModel::Isotropic(0.01);
  const double truth = IrFirstOrder(m, x, noise);
  double mse = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const double e = IrMcHard(m, x, noise, 100, MixSeed(9, rep)) - truth;
    mse += e * e;
  }
  EXPECT_LE(mse / 1000.0, McMseBound(100));
}

TEST(NoiseModelTest, ValidatesParameters) {
  EXPECT_THROW(NoiseModel::Isotropic(0.0), Error);
  EXPECT_THROW(NoiseModel::Diagonal({0.1, -0.1}), Error);
  EXPECT_THROW(NoiseModel::Diagonal({0.1}).CheckDims(2), Error);
  EXPECT_EQ(ParseEstimator("tree_exact"), Estimator::kTreeExact);
  EXPECT_EQ(EstimatorName(Estimator::kMcSmoothed), "mc_smoothed");
  EXPECT_THROW(ParseEstimator("exact"), Error);
}

}  // namespace
}  // namespace robrec
