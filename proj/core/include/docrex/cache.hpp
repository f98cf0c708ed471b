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

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "docrex/backend.hpp"

namespace docrex {

// SHA-256 (hex) over the prompt, stage and decode parameters. Request
// context is not part of the key: identical prompts share one response.
std::string cache_key(const ChatRequest& request);

// Content-addressed response store: <dir>/<key[0:2]>/<key>.json.
// Writes go through a temporary file and a rename, serialized by a mutex;
// reads take no lock.
class CacheStore {
 public:
  explicit CacheStore(std::filesystem::path dir);

  enum class Lookup { kHit, kMiss, kCorrupt };

  struct Entry {
    Lookup status = Lookup::kMiss;
    BackendResponse response;
    std::string detail;  // reason when kCorrupt
  };

  Entry get(const std::string& key) const;
  void put(const std::string& key, const ChatRequest& request, const BackendResponse& response);
  void clear();
  size_t size() const;

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(const std::string& key) const;

 private:
  std::filesystem::path dir_;
  mutable std::mutex write_mu_;
};

// Serves repeated requests from the store and records new ones. Corrupt
// entries fall through to the inner backend and are noted in warnings().
class RecordingBackend : public ChatBackend {
 public:
  RecordingBackend(std::shared_ptr<CacheStore> store, std::shared_ptr<ChatBackend> inner);

  BackendResponse complete(const ChatRequest& request) override;
  std::string id() const override { return inner_->id(); }

  std::vector<std::string> warnings() const;

 private:
  std::shared_ptr<CacheStore> store_;
  std::shared_ptr<ChatBackend> inner_;
  mutable std::mutex warnings_mu_;
  std::vector<std::string> warnings_;
};

// Answers only from the store. A miss is reported as a non-transient
// BackendError(kProvider) so it is never retried.
class ReplayBackend : public ChatBackend {
 public:
  explicit ReplayBackend(std::shared_ptr<CacheStore> store) : store_(std::move(store)) {}

  BackendResponse complete(const ChatRequest& request) override;
  std::string id() const override { return "replay"; }

 private:
  std::shared_ptr<CacheStore> store_;
};

}  // namespace docrex
