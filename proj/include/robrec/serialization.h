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


// JSON persistence for models, trees, recourse results and evaluation
// reports. Doubles are written in shortest round-trip form, so a saved model
// reloads bit-exactly.

#ifndef ROBREC_SERIALIZATION_H_
#define ROBREC_SERIALIZATION_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "robrec/analysis.h"
#include "robrec/data.h"
#include "robrec/forest.h"
#include "robrec/model.h"
#include "robrec/recourse.h"

namespace robrec {

using Json = nlohmann::ordered_json;

inline constexpr int kModelFormatVersion = 1;

// A trained model together with what is needed to rebuild its data view.
struct ModelArtifact {
  // "linear", "mlp" or "forest".
  std::string kind;
  std::shared_ptr<const ScoreModel> score_model;
  std::shared_ptr<const Forest> forest;
  // For forests: the distilled tree whose regions back exact tree IR.
  std::shared_ptr<const Tree> distilled;
  double fidelity = 0.0;
  std::vector<NormParam> norm_params;
  std::vector<std::string> feature_names;
  uint64_t seed = 0;
  // Free-form training record (data source, split, config, accuracies).
  Json training = Json::object();

  size_t dims() const;
  // The classifier recourse is computed against: the score model, or the
  // distilled tree for forests.
  const Classifier& classifier() const;
};

Json TreeToJson(const Tree& tree);
Tree TreeFromJson(const Json& j);

Json ModelToJson(const ModelArtifact& artifact);
// Throws kInvalidArgument for malformed or unsupported documents.
ModelArtifact ModelFromJson(const Json& j);

void SaveModel(const ModelArtifact& artifact, const std::string& path);
ModelArtifact LoadModel(const std::string& path);

// NaN predicted_ir is written as null.
Json ResultToJson(const RecourseResult& result, const Json& params_echo);

Json ReportToJson(const EvalReport& report);

// Throw kIo on failure.
std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& content);

}  // namespace robrec

#endif  // ROBREC_SERIALIZATION_H_
