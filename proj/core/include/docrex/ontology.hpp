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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace docrex {

struct Relation {
  std::string id;    // knowledge-base property code, e.g. "P17"
  std::string name;  // e.g. "country"
  std::string description;
  std::optional<std::string> inverse_id;
  // A symmetric relation is its own inverse; inverse_id is left empty in the
  // file and reported as the relation's own id by inverse_of().
  bool symmetric = false;

  bool operator==(const Relation&) const = default;
};

// The closed relation inventory. Immutable after construction, so a single
// instance can be shared by any number of threads.
class RelationOntology {
 public:
  RelationOntology() = default;

  // Validates and indexes `relations`. Throws Error(kValidation) naming the
  // offending relation(s) on duplicate ids/names, empty fields, dangling or
  // asymmetric inverse pairs, or self-inverse relations not flagged
  // symmetric.
  explicit RelationOntology(std::vector<Relation> relations, bool require_descriptions = true);

  const std::vector<Relation>& relations() const { return relations_; }
  size_t size() const { return relations_.size(); }
  bool empty() const { return relations_.empty(); }

  // Exact match on id, then on name. No fuzzy matching.
  const Relation* resolve(std::string_view name_or_id) const;
  const Relation* by_id(std::string_view id) const;
  const Relation* by_name(std::string_view name) const;
  // ASCII case-insensitive name lookup, used when parsing model output.
  const Relation* by_name_ci(std::string_view name) const;

  const Relation* inverse_of(const Relation& relation) const;

  bool operator==(const RelationOntology& other) const { return relations_ == other.relations_; }

 private:
  std::vector<Relation> relations_;
  std::unordered_map<std::string, size_t> by_id_;
  std::unordered_map<std::string, size_t> by_name_;
  std::unordered_map<std::string, size_t> by_lower_name_;
};

// Parses the YAML ontology format (see docs/formats.md).
RelationOntology parse_ontology(std::string_view yaml, bool require_descriptions = true);
RelationOntology load_ontology(const std::filesystem::path& path, bool require_descriptions = true);
std::string serialize_ontology(const RelationOntology& ontology);

// The shipped 96-relation Re-DocRED inventory.
const RelationOntology& redocred_ontology();

}  // namespace docrex
