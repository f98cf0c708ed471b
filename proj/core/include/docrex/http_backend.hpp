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

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <string>

#include "docrex/backend.hpp"

namespace docrex {

// OpenAI-style chat completions over HTTP(S): a message list goes in, a
// choice list comes out. Works against hosted APIs and local servers
// (vLLM, llama.cpp server, ...) that expose fine-tuned adapters as model
// names.
struct HttpBackendConfig {
  std::string base_url;  // scheme://host[:port], e.g. "http://127.0.0.1:8000"
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key;   // sent as a bearer token when non-empty
  std::string system_prompt;
  std::chrono::milliseconds timeout{std::chrono::seconds(120)};
  int max_in_flight = 4;
  int requests_per_minute = 0;  // 0 = unlimited
};

// Reads the API key from `env_var`. Throws Error(kConfig) when unset or empty.
std::string resolve_api_key(const std::string& env_var);

std::string build_chat_request_body(const ChatRequest& request, const std::string& model,
                                    const std::string& system_prompt = {});

struct ParsedChatResponse {
  std::string text;
  std::optional<TokenUsage> usage;
};

// Extracts choices[0].message.content. Throws BackendError(kProvider) with
// the raw body when the payload is an error object or lacks a choice.
ParsedChatResponse parse_chat_response_body(const std::string& body, const std::string& stage,
                                            const std::string& backend_id);

class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(HttpBackendConfig config);

  BackendResponse complete(const ChatRequest& request) override;
  std::string id() const override { return id_; }

 private:
  void acquire();
  void release();

  HttpBackendConfig config_;
  std::string id_;

  std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  std::deque<std::chrono::steady_clock::time_point> recent_;  // request starts in the last minute
};

}  // namespace docrex
