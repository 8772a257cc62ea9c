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


// JSON-over-HTTP inference service. Service maps request bodies to JSON
// responses without touching the network, so it can be tested directly;
// HttpServer binds it to endpoints:
//
//   GET  /model/meta
//   GET  /instances?limit=N
//   POST /ir
//   POST /recourse
//   POST /pareto
//
// The loaded model and test set are immutable, so concurrent requests are
// safe. Errors are {code, message, field?} with status 400 for malformed
// requests and 422 when a well-formed request cannot be answered (for
// example a vanishing gradient).

#ifndef ROBREC_SERVER_H_
#define ROBREC_SERVER_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "robrec/data.h"
#include "robrec/pipeline.h"
#include "robrec/serialization.h"

namespace robrec {

inline constexpr size_t kServerMaxIters = 2000;
inline constexpr size_t kDefaultInstanceLimit = 20;

struct ServiceResponse {
  int status = 200;
  Json body;
};

class Service {
 public:
  Service(std::shared_ptr<const LoadedModel> model, Dataset test,
          uint64_t default_seed);

  ServiceResponse Meta() const;
  ServiceResponse Instances(const std::optional<std::string>& limit) const;
  ServiceResponse Ir(const std::string& body) const;
  ServiceResponse Recourse(const std::string& body) const;
  ServiceResponse Pareto(const std::string& body) const;

 private:
  std::shared_ptr<const LoadedModel> model_;
  Dataset test_;
  uint64_t default_seed_;
  double accuracy_;
};

// Maps an exception to the error payload and status the service returns.
ServiceResponse ErrorResponse(const std::exception& e);

class HttpServer {
 public:
  explicit HttpServer(const Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds host:port (port 0 picks a free one) and returns the bound port.
  // Throws kIo if the port cannot be bound.
  int Bind(const std::string& host, int port);
  // Serves until Stop(); blocks the calling thread.
  void Listen();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace robrec

#endif  // ROBREC_SERVER_H_
