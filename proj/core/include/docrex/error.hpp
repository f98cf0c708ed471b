// Copyright 2026 The docrex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace docrex {

enum class ErrorCode {
  kInput,       // malformed or inconsistent input files
  kValidation,  // ontology / corpus invariant violated
  kConfig,      // missing or contradictory configuration
  kIo,
  kBackendUnavailable,
  kProvider,
  kTimeout,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised by chat backends. Carries enough context to attribute the failure
// in a trace: the stage being served, the backend id and, for provider
// errors, the raw response body.
class BackendError : public Error {
 public:
  BackendError(ErrorCode code, const std::string& message, std::string stage,
               std::string backend_id, std::string body = {})
      : Error(code, message),
        stage_(std::move(stage)),
        backend_id_(std::move(backend_id)),
        body_(std::move(body)) {}

  const std::string& stage() const { return stage_; }
  const std::string& backend_id() const { return backend_id_; }
  const std::string& body() const { return body_; }

  // Transport failures and timeouts may succeed on retry; provider errors
  // (4xx with a payload) will not.
  bool transient() const {
    return code() == ErrorCode::kBackendUnavailable || code() == ErrorCode::kTimeout;
  }

 private:
  std::string stage_;
  std::string backend_id_;
  std::string body_;
};

}  // namespace docrex
