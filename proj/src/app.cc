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

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <memory>

#include "CLI11.hpp"
#include "robrec/analysis.h"
#include "robrec/ir.h"
#include "robrec/pipeline.h"
#include "robrec/rng.h"
#include "robrec/server.h"

namespace robrec {
namespace {

enum class FieldType { kString, kNumber, kInteger, kBool, kNumberList, kIndexList };

struct Field {
  const char* key;
  FieldType type;
  const char* help;
  std::function<void(RunConfig&, const Json&)> set;
};

double AsNumber(const Json& v, const std::string& key) {
  if (!v.is_number() || !std::isfinite(v.get<double>())) {
    ThrowInvalid("'" + key + "' must be a finite number", key);
  }
  return v.get<double>();
}

uint64_t AsUnsigned(const Json& v, const std::string& key) {
  if (!v.is_number_unsigned()) {
    ThrowInvalid("'" + key + "' must be a non-negative integer", key);
  }
  return v.get<uint64_t>();
}

std::vector<double> AsNumbers(const Json& v, const std::string& key) {
  if (!v.is_array()) ThrowInvalid("'" + key + "' must be a list", key);
  std::vector<double> out;
  for (const Json& e : v) out.push_back(AsNumber(e, key));
  return out;
}

std::vector<size_t> AsIndices(const Json& v, const std::string& key) {
  if (!v.is_array()) ThrowInvalid("'" + key + "' must be a list", key);
  std::vector<size_t> out;
  for (const Json& e : v) out.push_back(AsUnsigned(e, key));
  return out;
}

std::string AsString(const Json& v, const std::string& key) {
  if (!v.is_string()) ThrowInvalid("'" + key + "' must be a string", key);
  return v.get<std::string>();
}

bool AsBool(const Json& v, const std::string& key) {
  if (!v.is_boolean()) ThrowInvalid("'" + key + "' must be a boolean", key);
  return v.get<bool>();
}

int AsInt(const Json& v, const std::string& key) {
  const uint64_t u = AsUnsigned(v, key);
  if (u > 1u << 30) ThrowInvalid("'" + key + "' is too large", key);
  return static_cast<int>(u);
}

#define ROBREC_STRING(name, help) \
  {#name, FieldType::kString, help, \
   [](RunConfig& c, const Json& v) { c.name = AsString(v, #name); }}
#define ROBREC_NUMBER(name, help) \
  {#name, FieldType::kNumber, help, \
   [](RunConfig& c, const Json& v) { c.name = AsNumber(v, #name); }}
#define ROBREC_UNSIGNED(name, help) \
  {#name, FieldType::kInteger, help, \
   [](RunConfig& c, const Json& v) { c.name = AsUnsigned(v, #name); }}
#define ROBREC_INT(name, help) \
  {#name, FieldType::kInteger, help, \
   [](RunConfig& c, const Json& v) { c.name = AsInt(v, #name); }}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      ROBREC_STRING(command, "train|recourse|evaluate|sweep|verify-bounds|serve"),
      ROBREC_STRING(data, "CSV path or fixture:moons|fixture:blobs"),
      ROBREC_STRING(label_column, "label column of the CSV"),
      ROBREC_STRING(model, "model JSON path"),
      ROBREC_STRING(out, "output path (stdout when empty)"),
      ROBREC_UNSIGNED(seed, "seed for training, splitting and sampling"),
      ROBREC_STRING(kind, "linear|mlp|forest"),
      ROBREC_STRING(preset, "training preset: adult|compas|gmc|synthetic"),
      ROBREC_UNSIGNED(epochs, "training epochs"),
      ROBREC_UNSIGNED(batch_size, "SGD batch size"),
      ROBREC_NUMBER(learning_rate, "SGD learning rate"),
      ROBREC_UNSIGNED(hidden_units, "MLP hidden units"),
      ROBREC_NUMBER(test_fraction, "held-out fraction"),
      ROBREC_UNSIGNED(n_trees, "forest size"),
      ROBREC_INT(max_depth, "forest tree depth"),
      ROBREC_INT(distill_depth, "distilled tree depth"),
      ROBREC_STRING(method, "wachter|probe|probe-mc|probe-tree"),
      ROBREC_NUMBER(r, "invalidation target in (0, 1)"),
      ROBREC_NUMBER(sigma2, "isotropic noise variance"),
      ROBREC_NUMBER(lambda1, "weight of the IR hinge"),
      ROBREC_NUMBER(lambda2, "weight of the score shortfall"),
      {"lambda3_grid", FieldType::kNumberList, "cost weights, comma separated",
       [](RunConfig& c, const Json& v) {
         c.lambda3_grid = AsNumbers(v, "lambda3_grid");
       }},
      ROBREC_NUMBER(alpha, "gradient step size"),
      ROBREC_UNSIGNED(max_iters, "iteration cap per branch"),
      ROBREC_STRING(cost, "l1|l2"),
      ROBREC_NUMBER(target_score, "target logit score s"),
      {"robust_target", FieldType::kBool,
       "wachter: target the score whose linear IR equals r",
       [](RunConfig& c, const Json& v) {
         c.robust_target = AsBool(v, "robust_target");
       }},
      ROBREC_UNSIGNED(mc_samples, "samples per probe-mc iteration"),
      ROBREC_NUMBER(temperature, "sigmoid temperature of probe-mc"),
      {"frozen", FieldType::kIndexList, "features that must not change",
       [](RunConfig& c, const Json& v) { c.frozen = AsIndices(v, "frozen"); }},
      ROBREC_UNSIGNED(instance, "test-set row for recourse"),
      {"features", FieldType::kNumberList, "explicit normalized input",
       [](RunConfig& c, const Json& v) {
         c.features = AsNumbers(v, "features");
       }},
      ROBREC_UNSIGNED(k, "samples for the empirical IR"),
      ROBREC_UNSIGNED(max_instances, "cap on evaluated instances (0 = all)"),
      {"r_values", FieldType::kNumberList, "sweep targets",
       [](RunConfig& c, const Json& v) {
         c.r_values = AsNumbers(v, "r_values");
       }},
      {"sigma2_values", FieldType::kNumberList, "sweep noise variances",
       [](RunConfig& c, const Json& v) {
         c.sigma2_values = AsNumbers(v, "sigma2_values");
       }},
      ROBREC_STRING(host, "service bind address"),
      ROBREC_INT(serve_port, "service port"),
  };
  return fields;
}

#undef ROBREC_STRING
#undef ROBREC_NUMBER
#undef ROBREC_UNSIGNED
#undef ROBREC_INT

std::string FlagName(const char* key) {
  std::string flag = key;
  for (char& ch : flag) {
    if (ch == '_') ch = '-';
  }
  return "--" + flag;
}

Json ScalarFromText(const std::string& text, FieldType type,
                    const std::string& key) {
  if (type == FieldType::kString) return text;
  if (type == FieldType::kBool) return text == "true" || text == "1";
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (type == FieldType::kInteger || type == FieldType::kIndexList) {
    uint64_t v = 0;
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end) {
      ThrowInvalid("'" + key + "' expects a non-negative integer, got '" +
                       text + "'",
                   key);
    }
    return v;
  }
  double v = 0.0;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    ThrowInvalid("'" + key + "' expects a number, got '" + text + "'", key);
  }
  return v;
}

Json ValueFromText(const std::string& text, FieldType type,
                   const std::string& key) {
  if (type != FieldType::kNumberList && type != FieldType::kIndexList) {
    return ScalarFromText(text, type, key);
  }
  Json list = Json::array();
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(start, comma - start);
    if (item.empty()) ThrowInvalid("'" + key + "' has an empty entry", key);
    list.push_back(ScalarFromText(item, type, key));
    start = comma + 1;
  }
  return list;
}

std::string FormatNumber(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void Emit(const RunConfig& c, std::ostream& out, const std::string& content) {
  if (c.out.empty()) {
    out << content;
  } else {
    WriteTextFile(c.out, content);
  }
}

bool EndsWith(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

TrainConfig MakeTrainConfig(const RunConfig& c) {
  TrainConfig cfg = c.preset.empty() ? TrainConfig{} : TrainPreset(c.preset);
  if (c.epochs) cfg.epochs = *c.epochs;
  if (c.batch_size) cfg.batch_size = *c.batch_size;
  if (c.learning_rate) cfg.learning_rate = *c.learning_rate;
  cfg.hidden_units = c.hidden_units;
  cfg.seed = c.seed;
  cfg.Validate();
  return cfg;
}

MethodSpec MakeMethodSpec(const RunConfig& c, size_t dims) {
  MethodSpec spec;
  spec.method = c.method;
  spec.r = c.r;
  spec.sigma2 = c.sigma2;
  spec.lambda1 = c.lambda1;
  spec.lambda2 = c.lambda2;
  spec.lambda3_grid = c.lambda3_grid;
  spec.alpha = c.alpha;
  spec.max_iters = c.max_iters;
  spec.cost = ParseCostNorm(c.cost);
  spec.target_score = c.target_score;
  spec.robust_target = c.robust_target;
  spec.mc_samples = c.mc_samples;
  spec.temperature = c.temperature;
  spec.seed = c.seed;
  if (!c.frozen.empty()) {
    spec.frozen.assign(dims, false);
    for (size_t j : c.frozen) {
      if (j >= dims) ThrowInvalid("frozen feature index out of range", "frozen");
      spec.frozen[j] = true;
    }
  }
  return spec;
}

struct Loaded {
  std::shared_ptr<const LoadedModel> model;
  DataView data;
};

Loaded LoadModelAndData(const RunConfig& c) {
  if (c.model.empty()) ThrowInvalid("--model is required", "model");
  ModelArtifact artifact = LoadModel(c.model);
  const Json& t = artifact.training;
  std::string source = c.data;
  if (source.empty()) {
    source = t.contains("data") ? t.at("data").get<std::string>() : kMoonsFixture;
  }
  const std::string label = t.contains("label_column") && c.data.empty()
                                ? t.at("label_column").get<std::string>()
                                : c.label_column;
  const double fraction = t.value("test_fraction", c.test_fraction);
  const uint64_t split_seed = t.value("split_seed", c.seed);
  const Dataset raw = LoadSource(source, label);
  if (raw.dims() != artifact.norm_params.size()) {
    ThrowInvalid("dataset has " + std::to_string(raw.dims()) +
                     " features but the model expects " +
                     std::to_string(artifact.norm_params.size()),
                 "data");
  }
  Loaded loaded;
  loaded.data = PrepareData(raw, &artifact.norm_params, fraction, split_seed);
  loaded.model = std::make_shared<const LoadedModel>(std::move(artifact));
  return loaded;
}

void RunTrain(const RunConfig& c, std::ostream& out) {
  if (c.out.empty()) ThrowInvalid("--out is required for train", "out");
  const std::string source = c.data.empty() ? kMoonsFixture : c.data;
  const TrainConfig cfg = MakeTrainConfig(c);
  const DataView view =
      PrepareData(LoadSource(source, c.label_column), nullptr, c.test_fraction,
                  c.seed);
  ForestConfig forest;
  forest.n_trees = c.n_trees;
  forest.max_depth = c.max_depth;
  forest.distill_depth = c.distill_depth;
  ModelArtifact artifact = TrainArtifact(c.kind, view.train, cfg, forest);
  const Classifier& clf =
      artifact.forest ? static_cast<const Classifier&>(*artifact.forest)
                      : artifact.classifier();
  const double train_acc = Accuracy(clf, view.train);
  const double test_acc = Accuracy(clf, view.test);
  artifact.training = {{"data", source},
                       {"label_column", c.label_column},
                       {"test_fraction", c.test_fraction},
                       {"split_seed", c.seed},
                       {"batch_size", cfg.batch_size},
                       {"epochs", cfg.epochs},
                       {"learning_rate", cfg.learning_rate},
                       {"train_accuracy", train_acc},
                       {"test_accuracy", test_acc}};
  if (artifact.forest) {
    artifact.training["n_trees"] = forest.n_trees;
    artifact.training["max_depth"] = forest.max_depth;
    artifact.training["distill_depth"] = forest.distill_depth;
  } else if (c.kind == "mlp") {
    artifact.training["hidden_units"] = cfg.hidden_units;
  }
  SaveModel(artifact, c.out);
  out << "kind=" << c.kind << " train_accuracy=" << FormatNumber(train_acc)
      << " test_accuracy=" << FormatNumber(test_acc);
  if (artifact.forest) out << " fidelity=" << FormatNumber(artifact.fidelity);
  out << "\n";
}

void RunRecourse(const RunConfig& c, std::ostream& out) {
  const Loaded loaded = LoadModelAndData(c);
  const LoadedModel& model = *loaded.model;
  const bool has_features = !c.features.empty();
  if (has_features == c.instance.has_value()) {
    ThrowInvalid("exactly one of --instance and --features is required",
                 "instance");
  }
  Vector x;
  size_t row = 0;
  if (c.instance) {
    row = *c.instance;
    if (row >= loaded.data.test.rows()) {
      ThrowInvalid("instance out of range (test set has " +
                       std::to_string(loaded.data.test.rows()) + " rows)",
                   "instance");
    }
    x = loaded.data.test.features[row];
  } else {
    x = c.features;
    if (x.size() != model.dims()) {
      ThrowInvalid("--features must have " + std::to_string(model.dims()) +
                       " entries",
                   "features");
    }
  }
  const MethodSpec spec = MakeMethodSpec(c, model.dims());
  RecourseResult result;
  try {
    result = RunMethod(model, x, spec, row);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::kNumerical) throw;
    throw Error(ErrorCode::kNumerical, std::string(err.what()) + " (instance " +
                                           std::to_string(row) + ")");
  }
  Json doc = {{"instance", c.instance ? Json(row) : Json(nullptr)},
              {"x", x}};
  doc["result"] = ResultToJson(result, MethodSpecToJson(spec));
  doc["empirical_ir"] = IrMcHard(model.classifier(), result.x_check,
                                 NoiseModel::Isotropic(spec.sigma2), c.k,
                                 MixSeed(c.seed, row));
  doc["empirical_k"] = c.k;
  if (const auto bound = BoundFor(model, x, result, spec.sigma2)) {
    doc["bound"] = {{"omega", bound->omega},
                    {"upper_bound", bound->upper_bound},
                    {"linearized_ir", bound->linearized_ir}};
  }
  Emit(c, out, doc.dump(2) + "\n");
}

EvalOptions MakeEvalOptions(const RunConfig& c, const LoadedModel& model,
                            bool bounds) {
  EvalOptions options;
  options.samples = c.k;
  options.seed = c.seed;
  options.max_instances = c.max_instances;
  if (bounds && model.score_model() != nullptr) {
    options.bound_sigma = std::sqrt(c.sigma2);
  }
  return options;
}

void EmitReports(const RunConfig& c, std::ostream& out,
                 const std::vector<EvalReport>& reports) {
  if (EndsWith(c.out, ".json")) {
    Json rows = Json::array();
    for (const auto& rep : reports) rows.push_back(ReportToJson(rep));
    Emit(c, out, rows.dump(2) + "\n");
  } else {
    Emit(c, out, FormatReportCsv(reports));
  }
}

void RunEvaluate(const RunConfig& c, std::ostream& out) {
  const Loaded loaded = LoadModelAndData(c);
  const LoadedModel& model = *loaded.model;
  const MethodSpec spec = MakeMethodSpec(c, model.dims());
  EvalReport report = Evaluate(model.classifier(), loaded.data.test,
                               MakeGenerator(model, spec),
                               NoiseModel::Isotropic(c.sigma2),
                               MakeEvalOptions(c, model, true));
  report.method = c.method;
  report.r = c.r;
  report.sigma2 = c.sigma2;
  EmitReports(c, out, {report});
}

void RunSweep(const RunConfig& c, std::ostream& out) {
  const Loaded loaded = LoadModelAndData(c);
  const LoadedModel& model = *loaded.model;
  const MethodSpec base = MakeMethodSpec(c, model.dims());
  base.Validate(model);
  GeneratorFactory factory = [&](double r, double sigma2) {
    MethodSpec spec = base;
    spec.r = r;
    spec.sigma2 = sigma2;
    return MakeGenerator(model, spec);
  };
  EmitReports(c, out,
              ParetoSweep(model.classifier(), loaded.data.test, c.r_values,
                          c.sigma2_values, factory,
                          MakeEvalOptions(c, model, true), c.method));
}

void RunVerifyBounds(const RunConfig& c, std::ostream& out) {
  const Loaded loaded = LoadModelAndData(c);
  const LoadedModel& model = *loaded.model;
  if (model.score_model() == nullptr) {
    ThrowInvalid("verify-bounds needs a linear or mlp model", "model");
  }
  const MethodSpec spec = MakeMethodSpec(c, model.dims());
  EvalReport report = Evaluate(model.classifier(), loaded.data.test,
                               MakeGenerator(model, spec),
                               NoiseModel::Isotropic(c.sigma2),
                               MakeEvalOptions(c, model, true));
  report.method = c.method;
  report.r = c.r;
  report.sigma2 = c.sigma2;
  if (!c.out.empty()) WriteTextFile(c.out, ReportToJson(report).dump(2) + "\n");
  out << "checked: " << report.bound_checked << "\n"
      << "excluded: " << report.bound_excluded << "\n"
      << "violations: " << report.bound_violations << "\n";
}

void RunServe(const RunConfig& c, std::ostream& out) {
  Loaded loaded = LoadModelAndData(c);
  const Service service(loaded.model, std::move(loaded.data.test), c.seed);
  HttpServer server(service);
  const int port = server.Bind(c.host, c.serve_port);
  out << "listening on " << c.host << ":" << port << std::endl;
  server.Listen();
}

}  // namespace

void RunConfig::Validate() const {
  static const std::set<std::string> kCommands = {
      "train", "recourse", "evaluate", "sweep", "verify-bounds", "serve"};
  if (command.empty()) ThrowInvalid("a command is required", "command");
  if (!kCommands.count(command)) {
    ThrowInvalid("unknown command '" + command + "'", "command");
  }
  if (kind != "linear" && kind != "mlp" && kind != "forest") {
    ThrowInvalid("kind must be linear|mlp|forest", "kind");
  }
  if (method != "wachter" && method != "probe" && method != "probe-mc" &&
      method != "probe-tree") {
    ThrowInvalid("method must be wachter|probe|probe-mc|probe-tree", "method");
  }
  if (cost != "l1" && cost != "l2") ThrowInvalid("cost must be l1|l2", "cost");
  if (!(r > 0.0 && r < 1.0)) ThrowInvalid("r must lie in (0, 1)", "r");
  if (!(sigma2 > 0.0)) ThrowInvalid("sigma2 must be > 0", "sigma2");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    ThrowInvalid("test_fraction must lie in (0, 1)", "test_fraction");
  }
  if (!(lambda1 >= 0.0)) ThrowInvalid("lambda1 must be >= 0", "lambda1");
  if (!(lambda2 >= 0.0)) ThrowInvalid("lambda2 must be >= 0", "lambda2");
  if (lambda3_grid.empty()) ThrowInvalid("lambda3_grid is empty", "lambda3_grid");
  for (double v : lambda3_grid) {
    if (!(v >= 0.0)) ThrowInvalid("lambda3_grid entries must be >= 0", "lambda3_grid");
  }
  if (!(alpha > 0.0)) ThrowInvalid("alpha must be > 0", "alpha");
  if (max_iters < 1) ThrowInvalid("max_iters must be >= 1", "max_iters");
  if (k < 1) ThrowInvalid("k must be >= 1", "k");
  if (mc_samples < 1) ThrowInvalid("mc_samples must be >= 1", "mc_samples");
  if (!(temperature > 0.0)) ThrowInvalid("temperature must be > 0", "temperature");
  if (epochs && *epochs < 1) ThrowInvalid("epochs must be >= 1", "epochs");
  if (batch_size && *batch_size < 1) {
    ThrowInvalid("batch_size must be >= 1", "batch_size");
  }
  if (learning_rate && !(*learning_rate > 0.0)) {
    ThrowInvalid("learning_rate must be > 0", "learning_rate");
  }
  if (hidden_units < 1) ThrowInvalid("hidden_units must be >= 1", "hidden_units");
  if (n_trees < 1) ThrowInvalid("n_trees must be >= 1", "n_trees");
  if (max_depth < 1) ThrowInvalid("max_depth must be >= 1", "max_depth");
  if (distill_depth < 1) ThrowInvalid("distill_depth must be >= 1", "distill_depth");
  if (r_values.empty()) ThrowInvalid("r_values is empty", "r_values");
  for (double v : r_values) {
    if (!(v > 0.0 && v < 1.0)) ThrowInvalid("r_values must lie in (0, 1)", "r_values");
  }
  if (sigma2_values.empty()) ThrowInvalid("sigma2_values is empty", "sigma2_values");
  for (double v : sigma2_values) {
    if (!(v > 0.0)) ThrowInvalid("sigma2_values must be > 0", "sigma2_values");
  }
  if (serve_port < 0 || serve_port > 65535) {
    ThrowInvalid("serve_port must lie in [0, 65535]", "serve_port");
  }
}

RunConfig ConfigFromJson(const Json& j) {
  if (!j.is_object()) ThrowInvalid("config must be a JSON object", "config");
  std::map<std::string, const Field*> by_key;
  for (const Field& f : Fields()) by_key[f.key] = &f;
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    const auto it = by_key.find(key);
    if (it == by_key.end()) ThrowInvalid("unknown config key '" + key + "'", key);
    it->second->set(c, value);
  }
  return c;
}

void Run(const RunConfig& c, std::ostream& out) {
  c.Validate();
  if (c.command == "train") return RunTrain(c, out);
  if (c.command == "recourse") return RunRecourse(c, out);
  if (c.command == "evaluate") return RunEvaluate(c, out);
  if (c.command == "sweep") return RunSweep(c, out);
  if (c.command == "verify-bounds") return RunVerifyBounds(c, out);
  return RunServe(c, out);
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kFailedPrecondition:
      return 2;
    case ErrorCode::kIo:
      return 3;
    case ErrorCode::kNumerical:
      return 4;
  }
  return 1;
}

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  auto report = [&err](std::string_view code, const std::string& field,
                       const std::string& message) {
    err << "error code=" << code << " field=" << (field.empty() ? "-" : field)
        << " message=" << Json(message).dump() << "\n";
  };

  CLI::App app{"Recourse with a controlled invalidation rate"};
  std::string command;
  std::string config_path;
  app.add_option("command", command,
                 "train|recourse|evaluate|sweep|verify-bounds|serve");
  app.add_option("--config", config_path, "JSON config; flags override it");
  std::vector<std::string> values(Fields().size());
  std::vector<CLI::Option*> options(Fields().size());
  bool robust_flag = false;
  for (size_t i = 0; i < Fields().size(); ++i) {
    const Field& f = Fields()[i];
    if (std::string_view(f.key) == "command") continue;
    if (f.type == FieldType::kBool) {
      options[i] = app.add_flag(FlagName(f.key), robust_flag, f.help);
    } else {
      options[i] = app.add_option(FlagName(f.key), values[i], f.help);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    report("invalid_argument", "-", e.what());
    return 2;
  }

  try {
    Json merged = Json::object();
    if (!config_path.empty()) {
      const std::string text = ReadTextFile(config_path);
      try {
        merged = Json::parse(text);
      } catch (const Json::exception& e) {
        ThrowInvalid("config is not valid JSON: " + std::string(e.what()),
                     "config");
      }
      if (!merged.is_object()) ThrowInvalid("config must be a JSON object", "config");
    }
    for (size_t i = 0; i < Fields().size(); ++i) {
      if (options[i] == nullptr || options[i]->count() == 0) continue;
      const Field& f = Fields()[i];
      merged[f.key] = f.type == FieldType::kBool
                          ? Json(robust_flag)
                          : ValueFromText(values[i], f.type, f.key);
    }
    if (!command.empty()) merged["command"] = command;
    Run(ConfigFromJson(merged), out);
    return 0;
  } catch (const Error& e) {
    report(ErrorCodeName(e.code()), e.field(), e.what());
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    report("internal", "", e.what());
    return 1;
  }
}

}  // namespace robrec
