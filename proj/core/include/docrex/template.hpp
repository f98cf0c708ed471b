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

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace docrex {

using SlotMap = std::map<std::string, std::string, std::less<>>;

// A minimal placeholder template.
//
//   {name}              replaced by the value of slot `name` (required)
//   {?name} ... {/name} emitted only when slot `name` is present and non-empty
//   {{ and }}           literal '{' and '}'
//
// Slot names are [A-Za-z_][A-Za-z0-9_]*. Slot values are inserted verbatim and
// never re-scanned, so braces inside values are harmless.
class PromptTemplate {
 public:
  // Throws Error(kConfig) on unbalanced braces, unterminated or mismatched
  // sections, or invalid slot names.
  static PromptTemplate parse(std::string_view source, std::string name = "<inline>");

  // Throws Error(kConfig) when a required slot is missing.
  std::string render(const SlotMap& slots) const;

  const std::string& name() const { return name_; }
  // Every slot name referenced, required or optional, sorted and unique.
  std::vector<std::string> slot_names() const;

  struct Node;

 private:
  std::string name_;
  std::shared_ptr<const std::vector<Node>> nodes_;
};

struct PromptTemplate::Node {
  enum class Kind { kText, kSlot, kSection } kind;
  std::string value;  // literal text or slot name
  std::vector<Node> children;
};

}  // namespace docrex
