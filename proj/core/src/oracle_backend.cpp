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

#include <algorithm>
#include <set>

#include "docrex/backend.hpp"
#include "docrex/error.hpp"
#include "docrex/text.hpp"

namespace docrex {

namespace {

const Relation& require_relation(const RequestContext& context, const RelationOntology& ontology,
                                 Stage stage) {
  if (!context.relation) {
    throw Error(ErrorCode::kInput, std::string("oracle: stage '") + to_string(stage) +
                                       "' requires a relation in the request context");
  }
  const Relation* r = ontology.resolve(*context.relation);
  if (r == nullptr) r = ontology.by_name_ci(*context.relation);
  if (r == nullptr) {
    throw Error(ErrorCode::kInput, "oracle: unknown relation '" + *context.relation + "'");
  }
  return *r;
}

std::string join_lines(const std::set<std::string>& lines) {
  std::string out;
  for (const std::string& line : lines) {
    if (!out.empty()) out += '\n';
    out += line;
  }
  return out;
}

}  // namespace

std::string oracle_answer(const Document& doc, Stage stage, const RequestContext& context,
                          const RelationOntology& ontology) {
  switch (stage) {
    case Stage::kRelation: {
      std::set<std::string> names;
      for (const GoldFact& f : doc.gold_facts) {
        if (const Relation* r = ontology.by_id(f.relation_id)) names.insert(r->name);
      }
      if (names.empty()) return std::string(kNoRelation);
      return join_lines(names);
    }
    case Stage::kHead: {
      const Relation& relation = require_relation(context, ontology, stage);
      std::set<std::string> heads;
      for (const GoldFact& f : doc.gold_facts) {
        if (f.relation_id == relation.id) heads.insert(doc.entities[f.head].canonical());
      }
      return join_lines(heads);
    }
    case Stage::kFact: {
      const Relation* only = nullptr;
      if (context.relation) only = &require_relation(context, ontology, stage);
      std::set<std::string> allowed;
      for (const std::string& name : context.relation_set) {
        const Relation* r = ontology.resolve(name);
        if (r == nullptr) r = ontology.by_name_ci(name);
        if (r == nullptr) throw Error(ErrorCode::kInput, "oracle: unknown relation '" + name + "'");
        allowed.insert(r->id);
      }
      std::set<std::string> lines;
      for (const GoldFact& f : doc.gold_facts) {
        if (only != nullptr && f.relation_id != only->id) continue;
        if (!allowed.empty() && !allowed.count(f.relation_id)) continue;
        const Relation* r = ontology.by_id(f.relation_id);
        if (r == nullptr) continue;
        const std::string& head = doc.entities[f.head].canonical();
        if (context.subject && head != text::trim(*context.subject)) continue;
        lines.insert(format_fact(head, r->name, doc.entities[f.tail].canonical()));
      }
      // The direct-facts prompt asks for the sentinel when nothing applies.
      if (lines.empty() && only == nullptr && !context.subject) return std::string(kNoRelation);
      return join_lines(lines);
    }
  }
  return {};
}

OracleBackend::OracleBackend(std::span<const Document> docs, const RelationOntology& ontology)
    : ontology_(ontology) {
  for (const Document& doc : docs) docs_.emplace(doc.doc_id, &doc);
}

BackendResponse OracleBackend::complete(const ChatRequest& request) {
  auto it = docs_.find(request.context.doc_id);
  if (it == docs_.end()) {
    throw BackendError(ErrorCode::kProvider,
                       "oracle: unknown document '" + request.context.doc_id + "'",
                       to_string(request.stage), id());
  }
  BackendResponse response;
  response.text = oracle_answer(*it->second, request.stage, request.context, ontology_);
  response.backend_id = id();
  return response;
}

}  // namespace docrex
