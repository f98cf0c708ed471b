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

#include <array>
#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "docrex/corpus.hpp"
#include "docrex/ontology.hpp"
#include "docrex/prompts.hpp"

namespace docrex {

struct DecodeParams {
  double temperature = 0.0;
  int max_tokens = 2048;
  std::vector<std::string> stop;

  bool operator==(const DecodeParams&) const = default;
};

// What the prompt is about. Remote backends ignore it; the oracle backend
// uses it to answer from gold annotations.
struct RequestContext {
  std::string doc_id;
  std::optional<std::string> relation;  // relation name or id
  std::optional<std::string> subject;
  std::vector<std::string> relation_set;  // D-RS-F: the relations embedded in the prompt
};

struct ChatRequest {
  std::string prompt;
  Stage stage = Stage::kRelation;
  DecodeParams decode;
  RequestContext context;
};

// Throws Error(kInput) for an empty prompt, max_tokens < 1 or a negative
// temperature.
void validate(const ChatRequest& request);

struct TokenUsage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct BackendResponse {
  std::string text;
  double latency_ms = 0.0;
  std::optional<TokenUsage> usage;
  std::string backend_id;
  bool from_cache = false;
};

// A chat-completion provider. Implementations must be safe for concurrent
// calls to complete().
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  // Throws BackendError on failure.
  virtual BackendResponse complete(const ChatRequest& request) = 0;
  virtual std::string id() const = 0;
};

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};
};

// Binds each stage to a backend. One backend may serve several stages, e.g.
// one base model with three adapters exposed as three model names.
class StageRouting {
 public:
  StageRouting() = default;
  explicit StageRouting(std::shared_ptr<ChatBackend> all) { bind_all(std::move(all)); }

  void bind(Stage stage, std::shared_ptr<ChatBackend> backend);
  void bind_all(std::shared_ptr<ChatBackend> backend);

  ChatBackend* backend(Stage stage) const { return backends_[index(stage)].get(); }
  bool complete() const;
  // Throws Error(kConfig) naming every unbound stage.
  void validate() const;

  RetryPolicy retry;
  // Used between retry attempts; replaceable so tests do not sleep.
  std::function<void(std::chrono::milliseconds)> sleep;

 private:
  static size_t index(Stage stage) { return static_cast<size_t>(stage); }
  std::array<std::shared_ptr<ChatBackend>, 3> backends_;
};

// Sends `request` to the backend bound to its stage. Transient failures
// (transport errors, timeouts, 429/5xx) are retried with exponential backoff
// up to retry.max_attempts; the last error is rethrown. Unbound stages fail
// with Error(kConfig) before any backend is touched.
BackendResponse chat(const ChatRequest& request, const StageRouting& routing);

// The text a perfect model would produce for the given stage, following the
// output formats the prompts ask for:
//   relation: gold relation names, one per line, or "no relation"
//   head:     first-mention text of each gold head of context.relation
//   fact:     "[head, relation, tail]" lines using first-mention texts,
//             restricted to context.relation / context.subject when given
// Lines are sorted and unique. Throws Error(kInput) if a required context
// field is missing or names an unknown relation.
std::string oracle_answer(const Document& doc, Stage stage, const RequestContext& context,
                          const RelationOntology& ontology);

// Answers every request from gold annotations via oracle_answer().
class OracleBackend : public ChatBackend {
 public:
  OracleBackend(std::span<const Document> docs, const RelationOntology& ontology);

  BackendResponse complete(const ChatRequest& request) override;
  std::string id() const override { return "oracle"; }

 private:
  std::unordered_map<std::string, const Document*> docs_;
  const RelationOntology& ontology_;
};

// Delegates to a callback. Used by tests and for fault injection.
class ScriptedBackend : public ChatBackend {
 public:
  using Script = std::function<std::string(const ChatRequest&)>;

  explicit ScriptedBackend(Script script, std::string id = "scripted")
      : script_(std::move(script)), id_(std::move(id)) {}

  BackendResponse complete(const ChatRequest& request) override;
  std::string id() const override { return id_; }
  size_t calls() const { return calls_.load(); }

 private:
  Script script_;
  std::string id_;
  std::atomic<size_t> calls_{0};
};

}  // namespace docrex
