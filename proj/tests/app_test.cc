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


#include "robrec/app.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "robrec/error.h"
#include "robrec/serialization.h"

namespace robrec {
namespace {

using ::testing::HasSubstr;
using ::testing::StartsWith;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "robrec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class AppTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("robrec_app_test_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  std::string TrainLinear() {
    const std::string model = Path("linear.json");
    const CliRun run = Cli({"train", "--data", "fixture:blobs", "--kind",
                            "linear", "--epochs", "100", "--out", model});
    EXPECT_EQ(run.code, 0) << run.err;
    return model;
  }

  std::filesystem::path dir_;
};

TEST(ConfigFromJsonTest, ReadsTypedFieldsAndRejectsUnknownKeys) {
  const RunConfig c = ConfigFromJson(Json::parse(R"({
    "command": "evaluate", "r": 0.2, "lambda3_grid": [0, 1],
    "robust_target": true, "frozen": [1], "max_iters": 50, "seed": 7
  })"));
  EXPECT_EQ(c.command, "evaluate");
  EXPECT_EQ(c.r, 0.2);
  EXPECT_EQ(c.lambda3_grid, (std::vector<double>{0.0, 1.0}));
  EXPECT_TRUE(c.robust_target);
  EXPECT_EQ(c.frozen, (std::vector<size_t>{1}));
  EXPECT_EQ(c.max_iters, 50u);
  EXPECT_EQ(c.seed, 7u);

  try {
    ConfigFromJson(Json::parse(R"({"rr": 0.2})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    EXPECT_EQ(e.field(), "rr");
  }
  EXPECT_THROW(ConfigFromJson(Json::parse(R"({"r": "high"})")), Error);
  EXPECT_THROW(ConfigFromJson(Json::parse(R"({"max_iters": -3})")), Error);
  EXPECT_THROW(ConfigFromJson(Json::array()), Error);
}

TEST(RunConfigTest, ValidateNamesTheField) {
  RunConfig c;
  c.command = "evaluate";
  c.r = 1.5;
  try {
    c.Validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.field(), "r");
  }
  c.r = 0.3;
  c.command = "launch";
  EXPECT_THROW(c.Validate(), Error);
}

TEST(ExitCodeTest, Mapping) {
  EXPECT_EQ(ExitCodeFor(ErrorCode::kInvalidArgument), 2);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kFailedPrecondition), 2);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kIo), 3);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kNumerical), 4);
}

TEST_F(AppTest, TrainPrintsAccuraciesAndWritesModel) {
  const std::string model = Path("m.json");
  const CliRun run = Cli({"train", "--data", "fixture:moons", "--kind", "mlp",
                          "--epochs", "50", "--hidden-units", "16", "--out",
                          model});
  ASSERT_EQ(run.code, 0) << run.err;
  EXPECT_THAT(run.out, StartsWith("kind=mlp train_accuracy="));
  EXPECT_THAT(run.out, HasSubstr(" test_accuracy="));
  const ModelArtifact a = LoadModel(model);
  EXPECT_EQ(a.kind, "mlp");
  EXPECT_EQ(a.training.at("data"), "fixture:moons");
}

TEST_F(AppTest, ForestTrainingReportsFidelity) {
  const CliRun run = Cli({"train", "--kind", "forest", "--n-trees", "5",
                          "--out", Path("f.json")});
  ASSERT_EQ(run.code, 0) << run.err;
  EXPECT_THAT(run.out, HasSubstr(" fidelity="));
}

TEST_F(AppTest, RecourseEmitsResultDocument) {
  const std::string model = TrainLinear();
  const CliRun run = Cli({"recourse", "--model", model, "--instance", "0",
                          "--r", "0.2", "--k", "2000"});
  ASSERT_EQ(run.code, 0) << run.err;
  const Json doc = Json::parse(run.out);
  EXPECT_EQ(doc.at("instance"), 0);
  EXPECT_EQ(doc.at("result").at("method"), "probe");
  EXPECT_EQ(doc.at("result").at("params_echo").at("r"), 0.2);
  EXPECT_EQ(doc.at("empirical_k"), 2000);
  EXPECT_TRUE(doc.contains("empirical_ir"));
}

TEST_F(AppTest, ConfigFileWithFlagOverride) {
  const std::string model = TrainLinear();
  const std::string config = Path("c.json");
  WriteTextFile(config, Json{{"command", "recourse"},
                             {"model", model},
                             {"instance", 0},
                             {"r", 0.3},
                             {"method", "wachter"}}
                            .dump());
  const CliRun run = Cli({"--config", config, "--r", "0.1", "--method", "probe"});
  ASSERT_EQ(run.code, 0) << run.err;
  const Json doc = Json::parse(run.out);
  EXPECT_EQ(doc.at("result").at("params_echo").at("r"), 0.1);
  EXPECT_EQ(doc.at("result").at("method"), "probe");
}

TEST_F(AppTest, ErrorsMapToExitCodes) {
  CliRun run = Cli({"evaluate", "--model", Path("missing.json")});
  EXPECT_EQ(run.code, 3);
  EXPECT_THAT(run.err, StartsWith("error code=io_error"));

  const std::string model = TrainLinear();
  run = Cli({"evaluate", "--model", model, "--r", "1.5"});
  EXPECT_EQ(run.code, 2);
  EXPECT_THAT(run.err, HasSubstr("field=r"));

  run = Cli({"recourse", "--model", model, "--instance", "100000"});
  EXPECT_EQ(run.code, 2);
  EXPECT_THAT(run.err, HasSubstr("field=instance"));

  run = Cli({"evaluate", "--model", model, "--bogus-flag", "1"});
  EXPECT_EQ(run.code, 2);

  const std::string bad_csv = Path("bad.csv");
  WriteTextFile(bad_csv, "a,label\n0.1,1\nfoo,0\n");
  run = Cli({"train", "--data", bad_csv, "--out", Path("x.json")});
  EXPECT_EQ(run.code, 2);
  EXPECT_THAT(run.err, HasSubstr("row 3"));
}

TEST_F(AppTest, EvaluateAndSweepWriteCsvOrJson) {
  const std::string model = TrainLinear();
  CliRun run = Cli({"evaluate", "--model", model, "--k", "1000"});
  ASSERT_EQ(run.code, 0) << run.err;
  EXPECT_THAT(run.out, StartsWith("method,r,sigma2,RA,"));

  const std::string out = Path("sweep.json");
  run = Cli({"sweep", "--model", model, "--k", "500", "--r-values", "0.3,0.2",
             "--out", out});
  ASSERT_EQ(run.code, 0) << run.err;
  const Json rows = Json::parse(ReadTextFile(out));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].at("r"), 0.2);
  EXPECT_LT(rows[0].at("AC_mean").get<double>(),
            rows[1].at("AC_mean").get<double>());
}

TEST_F(AppTest, VerifyBoundsReportsZeroViolationsForLinear) {
  const std::string model = TrainLinear();
  const CliRun run = Cli({"verify-bounds", "--model", model, "--k", "200"});
  ASSERT_EQ(run.code, 0) << run.err;
  EXPECT_THAT(run.out, HasSubstr("violations: 0\n"));
  EXPECT_THAT(run.out, StartsWith("checked: "));
}

TEST_F(AppTest, InstalledBinaryIsDeterministic) {
  const std::string model = Path("det.json");
  const std::string cli = ROBREC_CLI_PATH;
  auto capture = [](const std::string& cmd) {
    std::string text;
    FILE* pipe = popen(cmd.c_str(), "r");
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) text.append(buf, n);
    EXPECT_EQ(pclose(pipe), 0) << cmd;
    return text;
  };
  const std::string train = cli + " train --kind linear --data fixture:blobs --out " + model;
  const std::string first_train = capture(train);
  const std::string first_model = ReadTextFile(model);
  EXPECT_EQ(capture(train), first_train);
  EXPECT_EQ(ReadTextFile(model), first_model);
  const std::string eval = cli + " evaluate --k 500 --model " + model;
  EXPECT_EQ(capture(eval), capture(eval));
  EXPECT_NE(std::system((cli + " evaluate --model /nonexistent >/dev/null 2>&1").c_str()), 0);
}

}  // namespace
}  // namespace robrec
