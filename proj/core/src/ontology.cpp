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

#include "docrex/ontology.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

#include "docrex/error.hpp"
#include "docrex/resources.hpp"
#include "docrex/text.hpp"

namespace docrex {

namespace {

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorCode::kValidation, "ontology: " + message);
}

}  // namespace

RelationOntology::RelationOntology(std::vector<Relation> relations, bool require_descriptions)
    : relations_(std::move(relations)) {
  for (size_t i = 0; i < relations_.size(); ++i) {
    const Relation& r = relations_[i];
    if (r.id.empty()) invalid("relation #" + std::to_string(i) + " has an empty id");
    if (r.name.empty()) invalid("relation '" + r.id + "' has an empty name");
    if (require_descriptions && r.description.empty()) {
      invalid("relation '" + r.name + "' has an empty description");
    }
    if (!by_id_.emplace(r.id, i).second) invalid("duplicate relation id '" + r.id + "'");
    if (!by_name_.emplace(r.name, i).second) invalid("duplicate relation name '" + r.name + "'");
    if (!by_lower_name_.emplace(text::ascii_lower(r.name), i).second) {
      invalid("relation names differ only by case: '" + r.name + "'");
    }
  }

  for (const Relation& r : relations_) {
    if (r.symmetric && r.inverse_id && *r.inverse_id != r.id) {
      invalid("relation '" + r.id + "' is flagged symmetric but declares inverse '" +
              *r.inverse_id + "'");
    }
    if (!r.inverse_id) continue;
    if (*r.inverse_id == r.id && !r.symmetric) {
      invalid("relation '" + r.id + "' is its own inverse but is not flagged symmetric");
    }
    const Relation* inv = by_id(*r.inverse_id);
    if (inv == nullptr) {
      invalid("relation '" + r.id + "' declares unknown inverse '" + *r.inverse_id + "'");
    }
    if (inv != &r && inv->inverse_id != r.id) {
      invalid("asymmetric inverse pair: '" + r.id + "' -> '" + inv->id + "' but '" + inv->id +
              "' -> '" + inv->inverse_id.value_or("<none>") + "'");
    }
  }
}

const Relation* RelationOntology::by_id(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &relations_[it->second];
}

const Relation* RelationOntology::by_name(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  return it == by_name_.end() ? nullptr : &relations_[it->second];
}

const Relation* RelationOntology::by_name_ci(std::string_view name) const {
  auto it = by_lower_name_.find(text::ascii_lower(name));
  return it == by_lower_name_.end() ? nullptr : &relations_[it->second];
}

const Relation* RelationOntology::resolve(std::string_view name_or_id) const {
  if (const Relation* r = by_id(name_or_id)) return r;
  return by_name(name_or_id);
}

const Relation* RelationOntology::inverse_of(const Relation& relation) const {
  if (relation.symmetric) return by_id(relation.id);
  if (!relation.inverse_id) return nullptr;
  return by_id(*relation.inverse_id);
}

RelationOntology parse_ontology(std::string_view yaml, bool require_descriptions) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kInput, std::string("ontology: malformed YAML: ") + e.what());
  }
  const YAML::Node list = root["relations"];
  if (!list || !list.IsSequence()) {
    throw Error(ErrorCode::kInput, "ontology: expected a top-level 'relations' sequence");
  }

  std::vector<Relation> relations;
  relations.reserve(list.size());
  for (size_t i = 0; i < list.size(); ++i) {
    const YAML::Node node = list[i];
    const std::string where = "ontology: relations[" + std::to_string(i) + "]";
    if (!node.IsMap()) throw Error(ErrorCode::kInput, where + " is not a mapping");
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (key != "id" && key != "name" && key != "description" && key != "inverse_id" &&
          key != "symmetric") {
        throw Error(ErrorCode::kInput, where + ": unknown key '" + key + "'");
      }
    }
    for (const char* key : {"id", "name"}) {
      if (!node[key]) throw Error(ErrorCode::kInput, where + ": missing '" + key + "'");
    }
    try {
      Relation r;
      r.id = node["id"].as<std::string>();
      r.name = node["name"].as<std::string>();
      r.description = node["description"] ? node["description"].as<std::string>() : "";
      if (node["inverse_id"]) r.inverse_id = node["inverse_id"].as<std::string>();
      if (node["symmetric"]) r.symmetric = node["symmetric"].as<bool>();
      relations.push_back(std::move(r));
    } catch (const YAML::Exception& e) {
      throw Error(ErrorCode::kInput, where + ": " + e.what());
    }
  }
  return RelationOntology(std::move(relations), require_descriptions);
}

RelationOntology load_ontology(const std::filesystem::path& path, bool require_descriptions) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open ontology file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_ontology(buffer.str(), require_descriptions);
}

std::string serialize_ontology(const RelationOntology& ontology) {
  YAML::Emitter out;
  out << YAML::BeginMap << YAML::Key << "relations" << YAML::Value << YAML::BeginSeq;
  for (const Relation& r : ontology.relations()) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << r.id;
    out << YAML::Key << "name" << YAML::Value << r.name;
    if (r.inverse_id) out << YAML::Key << "inverse_id" << YAML::Value << *r.inverse_id;
    if (r.symmetric) out << YAML::Key << "symmetric" << YAML::Value << true;
    out << YAML::Key << "description" << YAML::Value << YAML::DoubleQuoted << r.description;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

const RelationOntology& redocred_ontology() {
  static const RelationOntology ontology = parse_ontology(resources::get("ontology/redocred.yaml"));
  return ontology;
}

}  // namespace docrex
