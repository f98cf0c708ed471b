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

#include "docrex/backend.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "docrex/error.hpp"

namespace docrex {

void validate(const ChatRequest& request) {
  if (request.prompt.empty()) throw Error(ErrorCode::kInput, "chat request has an empty prompt");
  if (request.decode.max_tokens < 1) {
    throw Error(ErrorCode::kInput, "chat request max_tokens must be >= 1");
  }
  if (request.decode.temperature < 0.0) {
    throw Error(ErrorCode::kInput, "chat request temperature must be non-negative");
  }
}

void StageRouting::bind(Stage stage, std::shared_ptr<ChatBackend> backend) {
  backends_[index(stage)] = std::move(backend);
}

void StageRouting::bind_all(std::shared_ptr<ChatBackend> backend) {
  for (auto& slot : backends_) slot = backend;
}

bool StageRouting::complete() const {
  return std::all_of(backends_.begin(), backends_.end(), [](const auto& b) { return b != nullptr; });
}

void StageRouting::validate() const {
  std::string missing;
  for (Stage s : {Stage::kRelation, Stage::kHead, Stage::kFact}) {
    if (backend(s) == nullptr) {
      if (!missing.empty()) missing += ", ";
      missing += to_string(s);
    }
  }
  if (!missing.empty()) throw Error(ErrorCode::kConfig, "no backend bound for stage(s): " + missing);
}

BackendResponse chat(const ChatRequest& request, const StageRouting& routing) {
  ChatBackend* backend = routing.backend(request.stage);
  if (backend == nullptr) {
    throw Error(ErrorCode::kConfig,
                std::string("no backend bound for stage '") + to_string(request.stage) + "'");
  }
  validate(request);

  const RetryPolicy& policy = routing.retry;
  auto delay = policy.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      return backend->complete(request);
    } catch (const BackendError& e) {
      if (!e.transient() || attempt >= std::max(1, policy.max_attempts)) throw;
    }
    if (routing.sleep) {
      routing.sleep(delay);
    } else {
      std::this_thread::sleep_for(delay);
    }
    delay = std::min(policy.max_backoff,
                     std::chrono::milliseconds(static_cast<long long>(delay.count() * policy.multiplier)));
  }
}

BackendResponse ScriptedBackend::complete(const ChatRequest& request) {
  ++calls_;
  BackendResponse response;
  response.text = script_(request);
  response.backend_id = id_;
  return response;
}

}  // namespace docrex
