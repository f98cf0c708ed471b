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

#include "docrex/template.hpp"

#include <set>

#include "docrex/error.hpp"

namespace docrex {

namespace {

using Node = PromptTemplate::Node;

bool valid_name(std::string_view name) {
  if (name.empty()) return false;
  auto head = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!head(name[0])) return false;
  for (char c : name.substr(1)) {
    if (!head(c) && !(c >= '0' && c <= '9')) return false;
  }
  return true;
}

class Parser {
 public:
  Parser(std::string_view src, const std::string& name) : src_(src), name_(name) {}

  std::vector<Node> parse() {
    bool closed = false;
    return parse_until("", closed);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kConfig,
                "template '" + name_ + "': " + what + " at offset " + std::to_string(pos_));
  }

  // Parses nodes up to the closing tag {/section}, or to end of input at the
  // top level. `closed` reports whether the closing tag was seen.
  std::vector<Node> parse_until(std::string_view section, bool& closed) {
    closed = false;
    std::vector<Node> nodes;
    std::string text;
    auto flush = [&] {
      if (!text.empty()) nodes.push_back({Node::Kind::kText, std::move(text), {}});
      text.clear();
    };
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '}') {
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '}') {
          text.push_back('}');
          pos_ += 2;
          continue;
        }
        fail("unbalanced '}'");
      }
      if (c != '{') {
        text.push_back(c);
        ++pos_;
        continue;
      }
      if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '{') {
        text.push_back('{');
        pos_ += 2;
        continue;
      }
      const size_t close = src_.find('}', pos_);
      if (close == std::string_view::npos) fail("unterminated placeholder");
      std::string_view tag = src_.substr(pos_ + 1, close - pos_ - 1);
      flush();
      if (!tag.empty() && tag[0] == '/') {
        if (section.empty() || tag.substr(1) != section) {
          fail("unexpected closing tag '{" + std::string(tag) + "}'");
        }
        pos_ = close + 1;
        closed = true;
        return nodes;
      }
      if (!tag.empty() && tag[0] == '?') {
        std::string name(tag.substr(1));
        if (!valid_name(name)) fail("invalid section name '" + name + "'");
        pos_ = close + 1;
        bool inner_closed = false;
        Node node{Node::Kind::kSection, name, parse_until(name, inner_closed)};
        if (!inner_closed) fail("section '" + name + "' is never closed");
        nodes.push_back(std::move(node));
        continue;
      }
      if (!valid_name(tag)) fail("invalid slot name '" + std::string(tag) + "'");
      nodes.push_back({Node::Kind::kSlot, std::string(tag), {}});
      pos_ = close + 1;
    }
    flush();
    return nodes;
  }

  std::string_view src_;
  const std::string& name_;
  size_t pos_ = 0;
};

void render_nodes(const std::vector<Node>& nodes, const SlotMap& slots, const std::string& name,
                  std::string& out) {
  for (const Node& node : nodes) {
    switch (node.kind) {
      case Node::Kind::kText:
        out.append(node.value);
        break;
      case Node::Kind::kSlot: {
        auto it = slots.find(node.value);
        if (it == slots.end()) {
          throw Error(ErrorCode::kConfig,
                      "template '" + name + "': slot '" + node.value + "' not provided");
        }
        out.append(it->second);
        break;
      }
      case Node::Kind::kSection: {
        auto it = slots.find(node.value);
        if (it != slots.end() && !it->second.empty()) render_nodes(node.children, slots, name, out);
        break;
      }
    }
  }
}

void collect(const std::vector<Node>& nodes, std::set<std::string>& names) {
  for (const Node& node : nodes) {
    if (node.kind != Node::Kind::kText) names.insert(node.value);
    collect(node.children, names);
  }
}

}  // namespace

PromptTemplate PromptTemplate::parse(std::string_view source, std::string name) {
  PromptTemplate t;
  t.name_ = std::move(name);
  Parser parser(source, t.name_);
  t.nodes_ = std::make_shared<const std::vector<Node>>(parser.parse());
  return t;
}

std::string PromptTemplate::render(const SlotMap& slots) const {
  std::string out;
  if (nodes_) render_nodes(*nodes_, slots, name_, out);
  return out;
}

std::vector<std::string> PromptTemplate::slot_names() const {
  std::set<std::string> names;
  if (nodes_) collect(*nodes_, names);
  return {names.begin(), names.end()};
}

}  // namespace docrex
