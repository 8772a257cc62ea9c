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

#ifndef ROBREC_ERROR_H_
#define ROBREC_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace robrec {

// Coarse failure categories. The CLI maps them to exit codes and the service
// maps them to HTTP statuses, so every thrown Error must carry one.
enum class ErrorCode {
  kInvalidArgument,     // bad inputs or config (exit 2, HTTP 400)
  kIo,                  // file system failures (exit 3)
  kNumerical,           // e.g. vanishing gradient (exit 4, HTTP 422)
  kFailedPrecondition,  // call is well formed but not applicable (HTTP 422)
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const { return code_; }
  // Name of the offending input field, empty when not attributable.
  const std::string& field() const { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

[[noreturn]] inline void ThrowInvalid(const std::string& message,
                                      std::string field = {}) {
  throw Error(ErrorCode::kInvalidArgument, message, std::move(field));
}

[[noreturn]] inline void ThrowNumerical(const std::string& message) {
  throw Error(ErrorCode::kNumerical, message);
}

[[noreturn]] inline void ThrowPrecondition(const std::string& message) {
  throw Error(ErrorCode::kFailedPrecondition, message);
}

}  // namespace robrec

#endif  // ROBREC_ERROR_H_
