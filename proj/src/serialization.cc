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
#include <fstream>
#include <sstream>

#include "robrec/error.h"

namespace robrec {
namespace {

Json FlatArray(const Vector& v) { return Json(v); }

Vector ReadVector(const Json& j, const char* key, size_t expected) {
  Vector v = j.at(key).get<Vector>();
  if (v.size() != expected) {
    ThrowInvalid(std::string("parameter '") + key + "' has length " +
                     std::to_string(v.size()) + ", expected " +
                     std::to_string(expected),
                 key);
  }
  return v;
}

Json OptionalNumber(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

size_t ModelArtifact::dims() const { return classifier().dims(); }

const Classifier& ModelArtifact::classifier() const {
  if (score_model) return *score_model;
  if (distilled) return *distilled;
  ThrowPrecondition("model artifact is empty");
}

Json TreeToJson(const Tree& tree) {
  Json nodes = Json::array();
  for (const TreeNode& n : tree.nodes()) {
    if (n.is_leaf()) {
      nodes.push_back({{"label", n.label}});
    } else {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right}});
    }
  }
  return {{"format_version", kModelFormatVersion},
          {"split_convention", "le"},
          {"dims", tree.dims()},
          {"root", tree.root()},
          {"nodes", std::move(nodes)}};
}

Tree TreeFromJson(const Json& j) {
  if (j.at("split_convention").get<std::string>() != "le") {
    ThrowInvalid("unsupported split convention", "split_convention");
  }
  if (j.at("format_version").get<int>() != kModelFormatVersion) {
    ThrowInvalid("unsupported tree format version", "format_version");
  }
  std::vector<TreeNode> nodes;
  for (const Json& jn : j.at("nodes")) {
    TreeNode n;
    if (jn.contains("feature")) {
      n.feature = jn.at("feature").get<int>();
      n.threshold = jn.at("threshold").get<double>();
      n.left = jn.at("left").get<int>();
      n.right = jn.at("right").get<int>();
    } else {
      n.label = jn.at("label").get<int>();
    }
    nodes.push_back(n);
  }
  return Tree(j.at("dims").get<size_t>(), std::move(nodes),
              j.at("root").get<int>());
}

Json ModelToJson(const ModelArtifact& a) {
  Json params = Json::object();
  if (const auto* lin = dynamic_cast<const LinearModel*>(a.score_model.get())) {
    params["weights"] = FlatArray(lin->weights());
    params["bias"] = lin->bias();
  } else if (const auto* mlp =
                 dynamic_cast<const MlpModel*>(a.score_model.get())) {
    params["hidden"] = mlp->hidden();
    params["hidden_weights"] = FlatArray(mlp->hidden_weights());
    params["hidden_bias"] = FlatArray(mlp->hidden_bias());
    params["output_weights"] = FlatArray(mlp->output_weights());
    params["output_bias"] = FlatArray(mlp->output_bias());
  } else if (a.forest) {
    Json trees = Json::array();
    for (const Tree& t : a.forest->trees()) trees.push_back(TreeToJson(t));
    params["trees"] = std::move(trees);
    if (a.distilled) {
      params["distilled"] = TreeToJson(*a.distilled);
      params["fidelity"] = a.fidelity;
    }
  } else {
    ThrowInvalid("cannot serialize an empty model", "model");
  }
  Json norm = Json::array();
  for (const NormParam& p : a.norm_params) norm.push_back({p.min, p.max});
  return {{"format_version", kModelFormatVersion},
          {"kind", a.kind},
          {"dims", a.dims()},
          {"parameters", std::move(params)},
          {"feature_names", a.feature_names},
          {"norm_params", std::move(norm)},
          {"seed", a.seed},
          {"training", a.training}};
}

ModelArtifact ModelFromJson(const Json& j) {
  try {
    if (!j.is_object()) ThrowInvalid("model document must be an object");
    if (j.at("format_version").get<int>() != kModelFormatVersion) {
      ThrowInvalid("unsupported model format version", "format_version");
    }
    ModelArtifact a;
    a.kind = j.at("kind").get<std::string>();
    const size_t d = j.at("dims").get<size_t>();
    const Json& p = j.at("parameters");
    if (a.kind == "linear") {
      a.score_model = std::make_shared<LinearModel>(
          ReadVector(p, "weights", d), p.at("bias").get<double>());
    } else if (a.kind == "mlp") {
      const size_t h = p.at("hidden").get<size_t>();
      a.score_model = std::make_shared<MlpModel>(
          d, h, ReadVector(p, "hidden_weights", h * d),
          ReadVector(p, "hidden_bias", h), ReadVector(p, "output_weights", 2 * h),
          ReadVector(p, "output_bias", 2));
    } else if (a.kind == "forest") {
      std::vector<Tree> trees;
      for (const Json& jt : p.at("trees")) trees.push_back(TreeFromJson(jt));
      a.forest = std::make_shared<Forest>(std::move(trees));
      if (!p.contains("distilled")) {
        ThrowInvalid("forest model lacks a distilled tree", "distilled");
      }
      a.distilled = std::make_shared<Tree>(TreeFromJson(p.at("distilled")));
      a.fidelity = p.at("fidelity").get<double>();
    } else {
      ThrowInvalid("unknown model kind '" + a.kind + "'", "kind");
    }
    if (a.dims() != d) ThrowInvalid("dims does not match parameters", "dims");
    a.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    for (const Json& np : j.at("norm_params")) {
      a.norm_params.push_back({np.at(0).get<double>(), np.at(1).get<double>()});
    }
    if (a.feature_names.size() != d || a.norm_params.size() != d) {
      ThrowInvalid("feature_names and norm_params must have length dims",
                   "norm_params");
    }
    a.seed = j.at("seed").get<uint64_t>();
    if (j.contains("training")) a.training = j.at("training");
    return a;
  } catch (const Json::exception& e) {
    ThrowInvalid(std::string("malformed model document: ") + e.what(), "model");
  }
}

void SaveModel(const ModelArtifact& artifact, const std::string& path) {
  WriteTextFile(path, ModelToJson(artifact).dump(2) + "\n");
}

ModelArtifact LoadModel(const std::string& path) {
  const std::string text = ReadTextFile(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    ThrowInvalid("model file " + path + " is not valid JSON: " + e.what(),
                 "model");
  }
  return ModelFromJson(j);
}

Json ResultToJson(const RecourseResult& r, const Json& params_echo) {
  Json j = {{"x_check", r.x_check},
            {"delta", r.delta},
            {"cost_l1", r.cost_l1},
            {"cost_l2", r.cost_l2},
            {"predicted_ir",
             std::isnan(r.predicted_ir) ? Json(nullptr) : Json(r.predicted_ir)},
            {"valid", r.valid},
            {"converged", r.converged},
            {"iterations", r.iterations},
            {"method", r.method},
            {"lambda", r.lambda}};
  j["params_echo"] = params_echo;
  return j;
}

Json ReportToJson(const EvalReport& rep) {
  return {{"method", rep.method},
          {"r", rep.r},
          {"sigma2", rep.sigma2},
          {"RA", rep.recourse_accuracy},
          {"AIR_mean", OptionalNumber(rep.air_mean)},
          {"AIR_std", OptionalNumber(rep.air_std)},
          {"AC_mean", OptionalNumber(rep.cost_mean)},
          {"AC_std", OptionalNumber(rep.cost_std)},
          {"n_instances", rep.n_instances},
          {"n_valid", rep.n_valid},
          {"n_converged", rep.n_converged},
          {"bound_checked", rep.bound_checked},
          {"bound_excluded", rep.bound_excluded},
          {"violations", rep.bound_violations}};
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path, "path");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed for " + path, "path");
  return buf.str();
}

void WriteTextFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path, "out");
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path, "out");
}

}  // namespace robrec
