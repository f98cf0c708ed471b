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

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docrex/ontology.hpp"

namespace docrex {

struct Mention {
  std::string text;
  int sent_id = 0;
  int start = 0;  // token offsets within the sentence, [start, end)
  int end = 0;
  std::string type;

  bool operator==(const Mention&) const = default;
};

struct Entity {
  std::vector<Mention> mentions;  // never empty

  // First mention's surface text. Used as the canonical alias by the oracle
  // backend and by the tuning-data generator.
  const std::string& canonical() const { return mentions.front().text; }
  // Distinct mention texts in first-occurrence order.
  std::vector<std::string> aliases() const;

  bool operator==(const Entity&) const = default;
};

struct GoldFact {
  int head = 0;  // entity index
  int tail = 0;
  std::string relation_id;
  std::vector<int> evidence;

  bool operator==(const GoldFact&) const = default;
};

struct Document {
  std::string doc_id;
  std::string title;
  std::vector<std::vector<std::string>> sentences;
  std::vector<Entity> entities;
  std::vector<GoldFact> gold_facts;

  // Whitespace-joined passage text, as substituted into prompts.
  std::string passage() const;

  bool operator==(const Document&) const = default;
};

struct CorpusStats {
  size_t n_documents = 0;
  size_t n_gold_facts = 0;
  size_t n_distinct_relations = 0;
  size_t max_facts_per_doc = 0;
  size_t max_relations_per_doc = 0;

  bool operator==(const CorpusStats&) const = default;
};

enum class LabelPolicy {
  kStrict,   // unknown relation codes are an input error
  kLenient,  // unknown relation codes and h == t labels are dropped and reported
};

struct SkippedLabel {
  std::string doc_id;
  size_t label_index = 0;
  std::string relation_id;
  std::string reason;  // "unknown-relation" or "self-loop"
};

struct ParsedCorpus {
  std::vector<Document> documents;
  std::vector<SkippedLabel> skipped_labels;
};

// Parses the DocRED / Re-DocRED JSON array format. Errors are reported as
// Error(kInput) with the document ordinal and a field path, e.g.
// "corpus[12].vertexSet[3][0].pos: span [4, 9) exceeds sentence length 7".
ParsedCorpus parse_corpus(std::string_view json, const RelationOntology& ontology,
                          LabelPolicy policy = LabelPolicy::kStrict);
ParsedCorpus load_corpus(const std::filesystem::path& path, const RelationOntology& ontology,
                         LabelPolicy policy = LabelPolicy::kStrict);

// Writes documents back in the same JSON format. parse_corpus(serialize_corpus(d))
// reproduces `d` (doc ids are re-derived from titles).
std::string serialize_corpus(std::span<const Document> docs);

// Removes repeated (head, relation, tail) triples, keeping the first
// occurrence. Returns the number of facts removed.
size_t dedup_facts(Document& doc);

struct InverseIssue {
  GoldFact fact;              // the fact whose reciprocal is missing
  std::string inverse_id;     // relation of the missing reciprocal
};

struct InverseReport {
  std::vector<InverseIssue> missing;
  size_t added = 0;  // facts appended when fixing
};

// Lists every fact (h, r, t) where r has a declared inverse r' and (t, r', h)
// is absent. With `fix`, appends the missing reciprocal facts to `doc`.
InverseReport check_inverse_consistency(Document& doc, const RelationOntology& ontology, bool fix);

CorpusStats corpus_stats(std::span<const Document> docs);

}  // namespace docrex
