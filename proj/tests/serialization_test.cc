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


#include "robrec/serialization.h"

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>

#include "gtest/gtest.h"
#include "robrec/data.h"
#include "robrec/error.h"
#include "robrec/pipeline.h"
#include "robrec/rng.h"
#include "test_util.h"

namespace robrec {
namespace {

Dataset Moons() { return Normalize(MakeMoons(200, 0.1, 4)); }

ModelArtifact Trained(const std::string& kind) {
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.hidden_units = 8;
  cfg.seed = 6;
  ForestConfig fc;
  fc.n_trees = 5;
  ModelArtifact a = TrainArtifact(kind, Moons(), cfg, fc);
  a.feature_names = {"x0", "x1"};
  a.norm_params = Moons().norm_params;
  return a;
}

ModelArtifact RoundTrip(const ModelArtifact& a) {
  return ModelFromJson(Json::parse(ModelToJson(a).dump()));
}

class ModelRoundTripTest : public ::testing::TestWithParam<std::string> {};

TEST_P(ModelRoundTripTest, ReloadsBitExactly) {
  const ModelArtifact a = Trained(GetParam());
  const ModelArtifact b = RoundTrip(a);
  EXPECT_EQ(b.kind, a.kind);
  EXPECT_EQ(b.seed, a.seed);
  EXPECT_EQ(b.feature_names, a.feature_names);
  ASSERT_EQ(b.norm_params.size(), a.norm_params.size());
  for (size_t j = 0; j < a.norm_params.size(); ++j) {
    EXPECT_EQ(b.norm_params[j].min, a.norm_params[j].min);
    EXPECT_EQ(b.norm_params[j].max, a.norm_params[j].max);
  }
  EXPECT_EQ(ModelToJson(b).dump(), ModelToJson(a).dump());
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const Vector x = testing::UniformPoint(rng, 2, -0.2, 1.2);
    EXPECT_EQ(b.classifier().Predict(x), a.classifier().Predict(x));
    if (a.score_model) {
      // Exact equality: shortest round-trip printing loses nothing.
      EXPECT_EQ(b.score_model->Score(x), a.score_model->Score(x));
    } else {
      EXPECT_EQ(b.forest->MeanVote(x), a.forest->MeanVote(x));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Kinds, ModelRoundTripTest,
                         ::testing::Values("linear", "mlp", "forest"));

TEST(ModelFileTest, SaveAndLoad) {
  const ModelArtifact a = Trained("linear");
  const std::string path =
      (std::filesystem::temp_directory_path() / "robrec_ser_test.json").string();
  SaveModel(a, path);
  const ModelArtifact b = LoadModel(path);
  std::filesystem::remove(path);
  EXPECT_EQ(ModelToJson(b).dump(), ModelToJson(a).dump());
  try {
    LoadModel("/nonexistent/dir/model.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(ModelFromJsonTest, RejectsMalformedDocuments) {
  const Json good = ModelToJson(Trained("forest"));
  auto expect_invalid = [](const Json& j) {
    try {
      ModelFromJson(j);
      ADD_FAILURE() << j.dump().substr(0, 80);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    }
  };
  Json j = good;
  j["format_version"] = 99;
  expect_invalid(j);
  j = good;
  j["kind"] = "svm";
  expect_invalid(j);
  j = good;
  j["parameters"]["distilled"]["split_convention"] = "lt";
  expect_invalid(j);
  j = good;
  j["dims"] = 3;
  expect_invalid(j);
  j = good;
  j.erase("parameters");
  expect_invalid(j);
  expect_invalid(Json::array());
}

TEST(TreeJsonTest, RecordsSplitConvention) {
  std::vector<TreeNode> nodes(3);
  nodes[0] = {1, 0.25, 1, 2, 0};
  nodes[1].label = 1;
  const Tree t(2, nodes, 0);
  const Json j = TreeToJson(t);
  EXPECT_EQ(j.at("split_convention"), "le");
  const Tree back = TreeFromJson(j);
  EXPECT_EQ(back.Predict(Vector{0.0, 0.25}), 1);
  EXPECT_EQ(back.Predict(Vector{0.0, 0.2500001}), 0);
}

TEST(ResultToJsonTest, NanIrBecomesNull) {
  RecourseResult r;
  r.x_check = {0.5, 0.25};
  r.delta = {0.1, 0.0};
  r.cost_l1 = 0.1;
  r.cost_l2 = 0.1;
  r.predicted_ir = std::numeric_limits<double>::quiet_NaN();
  r.method = "wachter";
  const Json j = ResultToJson(r, Json{{"r", 0.35}});
  EXPECT_TRUE(j.at("predicted_ir").is_null());
  EXPECT_EQ(j.at("params_echo").at("r"), 0.35);
  EXPECT_EQ(j.at("x_check").get<Vector>(), r.x_check);
  EXPECT_EQ(j.at("valid"), false);
  r.predicted_ir = 0.125;
  EXPECT_EQ(ResultToJson(r, Json::object()).at("predicted_ir"), 0.125);
}

TEST(ReportToJsonTest, AbsentStatisticsAreNull) {
  EvalReport rep;
  rep.method = "probe";
  rep.r = 0.2;
  const Json j = ReportToJson(rep);
  EXPECT_TRUE(j.at("AIR_mean").is_null());
  EXPECT_TRUE(j.at("AC_std").is_null());
  EXPECT_EQ(j.at("RA"), 0.0);
}

}  // namespace
}  // namespace robrec
