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

#include "docrex/http_backend.hpp"

#include <cstdlib>
#include <thread>

#include "docrex/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace docrex {

using nlohmann::json;

std::string resolve_api_key(const std::string& env_var) {
  const char* value = std::getenv(env_var.c_str());
  if (value == nullptr || *value == '\0') {
    throw Error(ErrorCode::kConfig, "environment variable " + env_var + " is not set");
  }
  return value;
}

std::string build_chat_request_body(const ChatRequest& request, const std::string& model,
                                    const std::string& system_prompt) {
  json messages = json::array();
  if (!system_prompt.empty()) messages.push_back({{"role", "system"}, {"content", system_prompt}});
  messages.push_back({{"role", "user"}, {"content", request.prompt}});
  json body = {{"model", model},
               {"messages", std::move(messages)},
               {"temperature", request.decode.temperature},
               {"max_tokens", request.decode.max_tokens}};
  if (!request.decode.stop.empty()) body["stop"] = request.decode.stop;
  return body.dump();
}

ParsedChatResponse parse_chat_response_body(const std::string& body, const std::string& stage,
                                            const std::string& backend_id) {
  auto fail = [&](const std::string& why) {
    throw BackendError(ErrorCode::kProvider, backend_id + ": " + why, stage, backend_id, body);
  };
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error&) {
    fail("response is not JSON");
  }
  if (doc.contains("error")) fail("provider returned an error object");
  if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
    fail("response has no choices");
  }
  const json& message = doc["choices"][0].value("message", json::object());
  ParsedChatResponse out;
  if (message.contains("content") && message["content"].is_string()) {
    out.text = message["content"].get<std::string>();
  } else if (!message.contains("content") || !message["content"].is_null()) {
    fail("choices[0].message.content is missing");
  }
  if (doc.contains("usage") && doc["usage"].is_object()) {
    out.usage = TokenUsage{doc["usage"].value("prompt_tokens", 0),
                           doc["usage"].value("completion_tokens", 0)};
  }
  return out;
}

HttpChatBackend::HttpChatBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw Error(ErrorCode::kConfig, "http backend: base_url is empty");
  if (config_.model.empty()) throw Error(ErrorCode::kConfig, "http backend: model is empty");
  if (config_.max_in_flight < 1) config_.max_in_flight = 1;
  id_ = "http:" + config_.model + "@" + config_.base_url;
}

void HttpChatBackend::acquire() {
  std::unique_lock<std::mutex> lock(mu_);
  cv_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
  ++in_flight_;
  if (config_.requests_per_minute > 0) {
    using clock = std::chrono::steady_clock;
    const auto window = std::chrono::minutes(1);
    for (;;) {
      const auto now = clock::now();
      while (!recent_.empty() && now - recent_.front() >= window) recent_.pop_front();
      if (static_cast<int>(recent_.size()) < config_.requests_per_minute) {
        recent_.push_back(now);
        break;
      }
      cv_.wait_until(lock, recent_.front() + window);
    }
  }
}

void HttpChatBackend::release() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    --in_flight_;
  }
  cv_.notify_all();
}

BackendResponse HttpChatBackend::complete(const ChatRequest& request) {
  const std::string stage = to_string(request.stage);
  acquire();
  struct Release {
    HttpChatBackend* self;
    ~Release() { self->release(); }
  } guard{this};

  httplib::Client client(config_.base_url);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  const auto started = std::chrono::steady_clock::now();
  auto result = client.Post(config_.path, headers,
                            build_chat_request_body(request, config_.model, config_.system_prompt),
                            "application/json");
  const double latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

  if (!result) {
    const auto err = result.error();
    const ErrorCode code = (err == httplib::Error::Read || err == httplib::Error::Write ||
                            err == httplib::Error::ConnectionTimeout)
                               ? ErrorCode::kTimeout
                               : ErrorCode::kBackendUnavailable;
    throw BackendError(code, id_ + ": " + httplib::to_string(err), stage, id_);
  }
  if (result->status == 429 || result->status >= 500) {
    throw BackendError(ErrorCode::kBackendUnavailable,
                       id_ + ": HTTP " + std::to_string(result->status), stage, id_, result->body);
  }
  if (result->status != 200) {
    throw BackendError(ErrorCode::kProvider, id_ + ": HTTP " + std::to_string(result->status),
                       stage, id_, result->body);
  }

  ParsedChatResponse parsed = parse_chat_response_body(result->body, stage, id_);
  BackendResponse response;
  response.text = std::move(parsed.text);
  response.usage = parsed.usage;
  response.latency_ms = latency_ms;
  response.backend_id = id_;
  return response;
}

}  // namespace docrex
