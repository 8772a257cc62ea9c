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


// Command-line front end. A run is described by a RunConfig assembled from
// an optional JSON config file and command-line flags (flags win). Config
// keys are the flag names with dashes replaced by underscores.

#ifndef ROBREC_APP_H_
#define ROBREC_APP_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "robrec/error.h"
#include "robrec/serialization.h"

namespace robrec {

struct RunConfig {
  // train | recourse | evaluate | sweep | verify-bounds | serve
  std::string command;
  // CSV path or fixture:moons / fixture:blobs. Empty means the source
  // recorded in the model file (or fixture:moons when training).
  std::string data;
  std::string label_column = "label";
  std::string model;
  std::string out;
  uint64_t seed = 0;

  // Training.
  std::string kind = "mlp";
  std::string preset;
  std::optional<size_t> epochs;
  std::optional<size_t> batch_size;
  std::optional<double> learning_rate;
  size_t hidden_units = 50;
  double test_fraction = 0.2;
  size_t n_trees = 30;
  int max_depth = 6;
  int distill_depth = 8;

  // Recourse.
  std::string method = "probe";
  double r = 0.35;
  double sigma2 = 0.01;
  double lambda1 = 2.0;
  double lambda2 = 1.0;
  std::vector<double> lambda3_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  double alpha = 0.05;
  size_t max_iters = 1000;
  std::string cost = "l1";
  double target_score = 0.0;
  bool robust_target = false;
  size_t mc_samples = 1000;
  double temperature = 100.0;
  std::vector<size_t> frozen;
  std::optional<size_t> instance;
  std::vector<double> features;

  // Evaluation.
  size_t k = 10000;
  size_t max_instances = 0;
  std::vector<double> r_values = {0.35, 0.3, 0.25, 0.2, 0.15};
  std::vector<double> sigma2_values = {0.01};

  // Service.
  std::string host = "127.0.0.1";
  int serve_port = 8080;

  // Range checks; throws kInvalidArgument naming the field.
  void Validate() const;
};

// Rejects unknown keys and wrongly typed values.
RunConfig ConfigFromJson(const Json& j);

// Executes one command. Throws Error on failure.
void Run(const RunConfig& config, std::ostream& out);

// 2 for invalid input, 3 for IO, 4 for numerical failures.
int ExitCodeFor(ErrorCode code);

// Parses argv, runs, and reports failures on `err` as one line:
//   error code=<name> field=<field> message="<text>"
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace robrec

#endif  // ROBREC_APP_H_
