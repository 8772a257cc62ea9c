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


#include "robrec/server.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "httplib.h"
#include "robrec/error.h"
#include "robrec/ir.h"

namespace robrec {
namespace {

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return 400;
    case ErrorCode::kNumerical:
    case ErrorCode::kFailedPrecondition:
      return 422;
    case ErrorCode::kIo:
      return 500;
  }
  return 500;
}

// Typed access to a JSON request object that rejects unknown keys.
class Request {
 public:
  Request(const std::string& body, std::set<std::string> allowed) {
    try {
      json_ = Json::parse(body);
    } catch (const Json::exception& e) {
      ThrowInvalid(std::string("request body is not valid JSON: ") + e.what(),
                   "body");
    }
    if (!json_.is_object()) ThrowInvalid("request body must be an object", "body");
    for (const auto& [key, value] : json_.items()) {
      if (!allowed.count(key)) ThrowInvalid("unknown field '" + key + "'", key);
    }
  }

  bool Has(const std::string& key) const {
    return json_.contains(key) && !json_.at(key).is_null();
  }

  double Number(const std::string& key, double fallback) const {
    if (!Has(key)) return fallback;
    const Json& v = json_.at(key);
    if (!v.is_number()) ThrowInvalid("'" + key + "' must be a number", key);
    const double d = v.get<double>();
    if (!std::isfinite(d)) ThrowInvalid("'" + key + "' must be finite", key);
    return d;
  }

  uint64_t Unsigned(const std::string& key, uint64_t fallback) const {
    if (!Has(key)) return fallback;
    const Json& v = json_.at(key);
    if (!v.is_number_unsigned()) {
      ThrowInvalid("'" + key + "' must be a non-negative integer", key);
    }
    return v.get<uint64_t>();
  }

  bool Bool(const std::string& key, bool fallback) const {
    if (!Has(key)) return fallback;
    if (!json_.at(key).is_boolean()) {
      ThrowInvalid("'" + key + "' must be a boolean", key);
    }
    return json_.at(key).get<bool>();
  }

  std::string String(const std::string& key, const std::string& fallback) const {
    if (!Has(key)) return fallback;
    if (!json_.at(key).is_string()) {
      ThrowInvalid("'" + key + "' must be a string", key);
    }
    return json_.at(key).get<std::string>();
  }

  Vector Numbers(const std::string& key) const {
    const Json& v = json_.at(key);
    if (!v.is_array()) ThrowInvalid("'" + key + "' must be an array", key);
    Vector out;
    for (const Json& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        ThrowInvalid("'" + key + "' must hold finite numbers", key);
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

 private:
  Json json_;
};

struct Instance {
  Vector x;
  std::optional<size_t> id;
};

Instance ReadInstance(const Request& req, const Dataset& test, size_t dims) {
  const bool has_features = req.Has("features");
  const bool has_id = req.Has("instance_id");
  if (has_features == has_id) {
    ThrowInvalid("exactly one of 'features' and 'instance_id' is required",
                 has_features ? "instance_id" : "features");
  }
  Instance inst;
  if (has_id) {
    const uint64_t id = req.Unsigned("instance_id", 0);
    if (id >= test.rows()) {
      ThrowInvalid("instance_id out of range (test set has " +
                       std::to_string(test.rows()) + " rows)",
                   "instance_id");
    }
    inst.id = id;
    inst.x = test.features[id];
  } else {
    inst.x = req.Numbers("features");
  }
  if (inst.x.size() != dims) {
    ThrowInvalid("'features' must have " + std::to_string(dims) + " entries",
                 "features");
  }
  return inst;
}

MethodSpec ReadMethodSpec(const Request& req, const LoadedModel& model,
                          uint64_t default_seed) {
  MethodSpec spec;
  spec.method = req.String(
      "method", model.score_model() != nullptr ? "probe" : "probe-tree");
  spec.r = req.Number("r", spec.r);
  spec.sigma2 = req.Number("sigma2", spec.sigma2);
  spec.lambda1 = req.Number("lambda1", spec.lambda1);
  spec.lambda2 = req.Number("lambda2", spec.lambda2);
  if (req.Has("lambda3_grid")) spec.lambda3_grid = req.Numbers("lambda3_grid");
  spec.alpha = req.Number("alpha", spec.alpha);
  spec.max_iters = std::min<uint64_t>(req.Unsigned("max_iters", spec.max_iters),
                                      kServerMaxIters);
  spec.cost = ParseCostNorm(req.String("cost", "l1"));
  spec.target_score = req.Number("target_score", spec.target_score);
  spec.robust_target = req.Bool("robust_target", false);
  spec.mc_samples = req.Unsigned("k", spec.mc_samples);
  spec.temperature = req.Number("temperature", spec.temperature);
  spec.seed = req.Unsigned("seed", default_seed);
  spec.Validate(model);
  return spec;
}

const std::set<std::string> kMethodKeys = {
    "features", "instance_id", "r",         "sigma2",        "method",
    "lambda1",  "lambda2",     "lambda3_grid", "alpha",      "max_iters",
    "cost",     "target_score", "robust_target", "k",        "temperature",
    "seed"};

template <typename Fn>
ServiceResponse Guard(Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return ErrorResponse(e);
  }
}

}  // namespace

ServiceResponse ErrorResponse(const std::exception& e) {
  ServiceResponse resp;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    resp.status = StatusFor(err->code());
    resp.body = {{"code", std::string(ErrorCodeName(err->code()))},
                 {"message", err->what()}};
    if (!err->field().empty()) resp.body["field"] = err->field();
  } else {
    resp.status = 500;
    resp.body = {{"code", "internal"}, {"message", e.what()}};
  }
  return resp;
}

Service::Service(std::shared_ptr<const LoadedModel> model, Dataset test,
                 uint64_t default_seed)
    : model_(std::move(model)),
      test_(std::move(test)),
      default_seed_(default_seed),
      accuracy_(test_.rows() > 0 ? Accuracy(model_->classifier(), test_) : 0.0) {
  if (test_.dims() != model_->dims()) {
    ThrowInvalid("dataset and model dimensions differ", "data");
  }
}

ServiceResponse Service::Meta() const {
  const ModelArtifact& a = model_->artifact();
  Json norm = Json::array();
  for (const NormParam& p : a.norm_params) norm.push_back({p.min, p.max});
  Json body = {{"kind", a.kind},
               {"d", model_->dims()},
               {"feature_names", a.feature_names},
               {"accuracy", accuracy_},
               {"norm_params", std::move(norm)},
               {"n_test", test_.rows()}};
  if (a.forest) {
    body["forest_accuracy"] = Accuracy(*a.forest, test_);
    body["fidelity"] = a.fidelity;
  }
  return {200, std::move(body)};
}

ServiceResponse Service::Instances(const std::optional<std::string>& limit) const {
  return Guard([&]() -> ServiceResponse {
    size_t n = kDefaultInstanceLimit;
    if (limit) {
      size_t pos = 0;
      long long v = -1;
      try {
        v = std::stoll(*limit, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != limit->size() || v < 1) {
        ThrowInvalid("limit must be a positive integer", "limit");
      }
      n = static_cast<size_t>(v);
    }
    Json rows = Json::array();
    const ScoreModel* score = model_->score_model();
    for (size_t i : NegativeRows(model_->classifier(), test_)) {
      if (rows.size() >= n) break;
      const Vector& x = test_.features[i];
      const double s = score != nullptr ? score->Score(x)
                                        : model_->artifact().forest->MeanVote(x);
      rows.push_back({{"id", i}, {"features", x}, {"score", s}});
    }
    return {200, {{"instances", std::move(rows)}}};
  });
}

ServiceResponse Service::Ir(const std::string& body) const {
  return Guard([&]() -> ServiceResponse {
    const Request req(body, {"features", "instance_id", "sigma2", "sigma_diag",
                             "estimator", "k", "temperature", "seed"});
    const Instance inst = ReadInstance(req, test_, model_->dims());
    if (req.Has("sigma2") == req.Has("sigma_diag")) {
      ThrowInvalid("exactly one of 'sigma2' and 'sigma_diag' is required",
                   "sigma2");
    }
    const NoiseModel noise =
        req.Has("sigma2") ? NoiseModel::Isotropic(req.Number("sigma2", 0.0))
                          : NoiseModel::Diagonal(req.Numbers("sigma_diag"));
    noise.CheckDims(model_->dims());
    const Estimator est = ParseEstimator(req.String(
        "estimator", model_->score_model() != nullptr ? "first_order"
                                                      : "tree_exact"));
    McParams mc;
    mc.samples = req.Unsigned("k", 10000);
    mc.temperature = req.Number("temperature", mc.temperature);
    mc.seed = req.Unsigned("seed", default_seed_);
    mc.Validate();
    const ScoreModel* score = model_->score_model();
    double ir = 0.0;
    switch (est) {
      case Estimator::kFirstOrder:
        if (score == nullptr) ThrowInvalid("first_order needs a score model", "estimator");
        ir = IrFirstOrder(*score, inst.x, noise);
        break;
      case Estimator::kMcHard:
        ir = IrMcHard(model_->classifier(), inst.x, noise, mc.samples, mc.seed);
        break;
      case Estimator::kMcSmoothed:
        if (score == nullptr) ThrowInvalid("mc_smoothed needs a score model", "estimator");
        ir = IrMcSmoothed(*score, inst.x, noise, mc);
        break;
      case Estimator::kTreeExact:
        if (model_->regions() == nullptr) {
          ThrowInvalid("tree_exact needs a forest model", "estimator");
        }
        ir = IrTree(*model_->regions(), inst.x, noise);
        break;
    }
    return {200,
            {{"ir", ir},
             {"estimator", std::string(EstimatorName(est))},
             {"seed", mc.seed}}};
  });
}

ServiceResponse Service::Recourse(const std::string& body) const {
  return Guard([&]() -> ServiceResponse {
    const Request req(body, kMethodKeys);
    const Instance inst = ReadInstance(req, test_, model_->dims());
    const MethodSpec spec = ReadMethodSpec(req, *model_, default_seed_);
    const size_t row = inst.id.value_or(0);
    const RecourseResult result = RunMethod(*model_, inst.x, spec, row);
    Json out = ResultToJson(result, MethodSpecToJson(spec));
    if (inst.id) out["instance_id"] = *inst.id;
    out["seed"] = spec.seed;
    if (const auto bound = BoundFor(*model_, inst.x, result, spec.sigma2)) {
      out["bound"] = {{"omega", bound->omega},
                      {"upper_bound", bound->upper_bound},
                      {"linearized_ir", bound->linearized_ir}};
    }
    return {200, std::move(out)};
  });
}

ServiceResponse Service::Pareto(const std::string& body) const {
  return Guard([&]() -> ServiceResponse {
    std::set<std::string> keys = kMethodKeys;
    keys.insert("r_values");
    const Request req(body, keys);
    if (req.Has("r")) ThrowInvalid("use 'r_values' for pareto requests", "r");
    const Instance inst = ReadInstance(req, test_, model_->dims());
    if (!req.Has("r_values")) ThrowInvalid("'r_values' is required", "r_values");
    const Vector r_values = req.Numbers("r_values");
    if (r_values.empty() || r_values.size() > 20) {
      ThrowInvalid("'r_values' must hold 1 to 20 entries", "r_values");
    }
    MethodSpec spec = ReadMethodSpec(req, *model_, default_seed_);
    Json rows = Json::array();
    for (double r : r_values) {
      spec.r = r;
      spec.Validate(*model_);
      const RecourseResult result =
          RunMethod(*model_, inst.x, spec, inst.id.value_or(0));
      rows.push_back({{"r", r},
                      {"cost_l1", result.cost_l1},
                      {"predicted_ir", std::isnan(result.predicted_ir)
                                           ? Json(nullptr)
                                           : Json(result.predicted_ir)},
                      {"converged", result.converged}});
    }
    return {200,
            {{"rows", std::move(rows)},
             {"sigma2", spec.sigma2},
             {"method", spec.method},
             {"seed", spec.seed}}};
  });
}

struct HttpServer::Impl {
  httplib::Server server;
};

namespace {

void Send(httplib::Response& res, const ServiceResponse& resp) {
  res.status = resp.status;
  res.set_content(resp.body.dump(), "application/json");
}

}  // namespace

HttpServer::HttpServer(const Service& service)
    : impl_(std::make_unique<Impl>()) {
  httplib::Server& s = impl_->server;
  // The library default also sets SO_REUSEPORT, which would let a second
  // server share a busy port silently instead of failing to bind.
  s.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  const Service* svc = &service;
  s.Get("/model/meta", [svc](const httplib::Request&, httplib::Response& res) {
    Send(res, svc->Meta());
  });
  s.Get("/instances", [svc](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string> limit;
    if (req.has_param("limit")) limit = req.get_param_value("limit");
    Send(res, svc->Instances(limit));
  });
  s.Post("/ir", [svc](const httplib::Request& req, httplib::Response& res) {
    Send(res, svc->Ir(req.body));
  });
  s.Post("/recourse", [svc](const httplib::Request& req, httplib::Response& res) {
    Send(res, svc->Recourse(req.body));
  });
  s.Post("/pareto", [svc](const httplib::Request& req, httplib::Response& res) {
    Send(res, svc->Pareto(req.body));
  });
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string& host, int port) {
  httplib::Server& s = impl_->server;
  const int bound = port == 0 ? s.bind_to_any_port(host.c_str())
                              : (s.bind_to_port(host.c_str(), port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorCode::kIo,
                "cannot bind " + host + ":" + std::to_string(port) +
                    " (port busy?)",
                "serve_port");
  }
  return bound;
}

void HttpServer::Listen() { impl_->server.listen_after_bind(); }

void HttpServer::Stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace robrec
