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

#include "docrex/cache.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "docrex/error.hpp"
#include "json.hpp"

namespace docrex {

using nlohmann::ordered_json;

namespace {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return out.str();
}

ordered_json decode_json(const DecodeParams& decode) {
  return {{"temperature", decode.temperature},
          {"max_tokens", decode.max_tokens},
          {"stop", decode.stop}};
}

}  // namespace

std::string cache_key(const ChatRequest& request) {
  ordered_json key = {{"prompt", request.prompt},
                      {"stage", to_string(request.stage)},
                      {"decode", decode_json(request.decode)}};
  return sha256_hex(key.dump());
}

CacheStore::CacheStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create cache directory " + dir_.string() + ": " + ec.message());
}

std::filesystem::path CacheStore::path_for(const std::string& key) const {
  return dir_ / key.substr(0, 2) / (key + ".json");
}

CacheStore::Entry CacheStore::get(const std::string& key) const {
  Entry entry;
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return entry;
  try {
    ordered_json doc = ordered_json::parse(in);
    if (doc.at("key").get<std::string>() != key) {
      entry.status = Lookup::kCorrupt;
      entry.detail = "key mismatch";
      return entry;
    }
    const ordered_json& resp = doc.at("response");
    entry.response.text = resp.at("text").get<std::string>();
    entry.response.backend_id = resp.value("backend_id", "");
    if (resp.contains("usage")) {
      entry.response.usage = TokenUsage{resp["usage"].value("prompt_tokens", 0),
                                        resp["usage"].value("completion_tokens", 0)};
    }
    entry.response.from_cache = true;
    entry.status = Lookup::kHit;
  } catch (const std::exception& e) {
    entry.status = Lookup::kCorrupt;
    entry.detail = e.what();
  }
  return entry;
}

void CacheStore::put(const std::string& key, const ChatRequest& request,
                     const BackendResponse& response) {
  ordered_json resp = {{"text", response.text}, {"backend_id", response.backend_id}};
  if (response.usage) {
    resp["usage"] = {{"prompt_tokens", response.usage->prompt_tokens},
                     {"completion_tokens", response.usage->completion_tokens}};
  }
  ordered_json doc = {{"key", key},
                      {"stage", to_string(request.stage)},
                      {"decode", decode_json(request.decode)},
                      {"prompt", request.prompt},
                      {"response", std::move(resp)}};
  const std::string body = doc.dump(2) + "\n";

  static std::atomic<unsigned long> counter{0};
  std::lock_guard<std::mutex> lock(write_mu_);
  const auto target = path_for(key);
  std::error_code ec;
  std::filesystem::create_directories(target.parent_path(), ec);
  auto tmp = target;
  tmp += ".tmp" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write cache entry " + tmp.string());
    out << body;
    if (!out) throw Error(ErrorCode::kIo, "cannot write cache entry " + tmp.string());
  }
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot commit cache entry " + target.string() + ": " + ec.message());
}

void CacheStore::clear() {
  std::lock_guard<std::mutex> lock(write_mu_);
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir_, ec)) {
    std::filesystem::remove_all(entry.path(), ec);
  }
}

size_t CacheStore::size() const {
  size_t n = 0;
  std::error_code ec;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir_, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") ++n;
  }
  return n;
}

RecordingBackend::RecordingBackend(std::shared_ptr<CacheStore> store,
                                   std::shared_ptr<ChatBackend> inner)
    : store_(std::move(store)), inner_(std::move(inner)) {}

BackendResponse RecordingBackend::complete(const ChatRequest& request) {
  const std::string key = cache_key(request);
  CacheStore::Entry entry = store_->get(key);
  if (entry.status == CacheStore::Lookup::kHit) return entry.response;
  if (entry.status == CacheStore::Lookup::kCorrupt) {
    std::lock_guard<std::mutex> lock(warnings_mu_);
    warnings_.push_back("corrupt cache entry " + store_->path_for(key).string() + ": " + entry.detail);
  }
  BackendResponse response = inner_->complete(request);
  store_->put(key, request, response);
  return response;
}

std::vector<std::string> RecordingBackend::warnings() const {
  std::lock_guard<std::mutex> lock(warnings_mu_);
  return warnings_;
}

BackendResponse ReplayBackend::complete(const ChatRequest& request) {
  const std::string key = cache_key(request);
  CacheStore::Entry entry = store_->get(key);
  if (entry.status == CacheStore::Lookup::kHit) return entry.response;
  // Not transient: retrying a replay miss cannot succeed.
  throw BackendError(ErrorCode::kProvider,
                     entry.status == CacheStore::Lookup::kCorrupt
                         ? "replay: corrupt cache entry " + key + ": " + entry.detail
                         : "replay: no recorded response for key " + key,
                     to_string(request.stage), id());
}

}  // namespace docrex
