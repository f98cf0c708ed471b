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

#include "docrex/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "docrex/error.hpp"
#include "docrex/text.hpp"
#include "json.hpp"

namespace docrex {

using nlohmann::json;

std::vector<std::string> Entity::aliases() const {
  std::vector<std::string> out;
  for (const Mention& m : mentions) {
    if (std::find(out.begin(), out.end(), m.text) == out.end()) out.push_back(m.text);
  }
  return out;
}

std::string Document::passage() const { return text::join_sentences(sentences); }

namespace {

[[noreturn]] void bad_input(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kInput, path + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) bad_input(path, std::string("missing field '") + key + "'");
  return *it;
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) bad_input(path, "expected an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) bad_input(path, "expected a string");
  return v.get<std::string>();
}

Document parse_document(const json& rec, size_t ordinal, const RelationOntology& ontology,
                        LabelPolicy policy, std::vector<SkippedLabel>& skipped) {
  const std::string base = "corpus[" + std::to_string(ordinal) + "]";
  if (!rec.is_object()) bad_input(base, "expected an object");

  Document doc;
  if (auto it = rec.find("title"); it != rec.end()) doc.title = as_string(*it, base + ".title");

  const json& sents = require(rec, "sents", base);
  if (!sents.is_array()) bad_input(base + ".sents", "expected an array");
  for (size_t s = 0; s < sents.size(); ++s) {
    const std::string spath = base + ".sents[" + std::to_string(s) + "]";
    if (!sents[s].is_array()) bad_input(spath, "expected an array of tokens");
    std::vector<std::string> tokens;
    tokens.reserve(sents[s].size());
    for (size_t k = 0; k < sents[s].size(); ++k) {
      tokens.push_back(as_string(sents[s][k], spath + "[" + std::to_string(k) + "]"));
    }
    doc.sentences.push_back(std::move(tokens));
  }

  const json& vertices = require(rec, "vertexSet", base);
  if (!vertices.is_array()) bad_input(base + ".vertexSet", "expected an array");
  for (size_t e = 0; e < vertices.size(); ++e) {
    const std::string epath = base + ".vertexSet[" + std::to_string(e) + "]";
    if (!vertices[e].is_array() || vertices[e].empty()) {
      bad_input(epath, "expected a non-empty array of mentions");
    }
    Entity entity;
    for (size_t m = 0; m < vertices[e].size(); ++m) {
      const std::string mpath = epath + "[" + std::to_string(m) + "]";
      const json& mj = vertices[e][m];
      if (!mj.is_object()) bad_input(mpath, "expected an object");
      Mention mention;
      mention.text = as_string(require(mj, "name", mpath), mpath + ".name");
      mention.sent_id = as_int(require(mj, "sent_id", mpath), mpath + ".sent_id");
      const json& pos = require(mj, "pos", mpath);
      if (!pos.is_array() || pos.size() != 2) bad_input(mpath + ".pos", "expected [start, end]");
      mention.start = as_int(pos[0], mpath + ".pos[0]");
      mention.end = as_int(pos[1], mpath + ".pos[1]");
      if (auto it = mj.find("type"); it != mj.end()) mention.type = as_string(*it, mpath + ".type");

      if (mention.text.empty()) bad_input(mpath + ".name", "empty mention text");
      if (mention.sent_id < 0 || mention.sent_id >= static_cast<int>(doc.sentences.size())) {
        bad_input(mpath + ".sent_id", "mention '" + mention.text + "' refers to sentence " +
                                          std::to_string(mention.sent_id) + " of " +
                                          std::to_string(doc.sentences.size()));
      }
      const int len = static_cast<int>(doc.sentences[mention.sent_id].size());
      if (mention.start < 0 || mention.start >= mention.end || mention.end > len) {
        bad_input(mpath + ".pos", "mention '" + mention.text + "' span [" +
                                      std::to_string(mention.start) + ", " +
                                      std::to_string(mention.end) + ") is invalid for sentence length " +
                                      std::to_string(len));
      }
      entity.mentions.push_back(std::move(mention));
    }
    doc.entities.push_back(std::move(entity));
  }

  if (auto it = rec.find("labels"); it != rec.end()) {
    const json& labels = *it;
    if (!labels.is_array()) bad_input(base + ".labels", "expected an array");
    const int n_entities = static_cast<int>(doc.entities.size());
    for (size_t l = 0; l < labels.size(); ++l) {
      const std::string lpath = base + ".labels[" + std::to_string(l) + "]";
      const json& lj = labels[l];
      if (!lj.is_object()) bad_input(lpath, "expected an object");
      GoldFact fact;
      fact.head = as_int(require(lj, "h", lpath), lpath + ".h");
      fact.tail = as_int(require(lj, "t", lpath), lpath + ".t");
      fact.relation_id = as_string(require(lj, "r", lpath), lpath + ".r");
      if (fact.head < 0 || fact.head >= n_entities) {
        bad_input(lpath + ".h", "entity index " + std::to_string(fact.head) + " out of range");
      }
      if (fact.tail < 0 || fact.tail >= n_entities) {
        bad_input(lpath + ".t", "entity index " + std::to_string(fact.tail) + " out of range");
      }
      if (auto ev = lj.find("evidence"); ev != lj.end()) {
        if (!ev->is_array()) bad_input(lpath + ".evidence", "expected an array");
        for (size_t k = 0; k < ev->size(); ++k) {
          fact.evidence.push_back(as_int((*ev)[k], lpath + ".evidence[" + std::to_string(k) + "]"));
        }
      }
      const char* reason = nullptr;
      if (ontology.by_id(fact.relation_id) == nullptr) {
        reason = "unknown-relation";
      } else if (fact.head == fact.tail) {
        reason = "self-loop";
      }
      if (reason != nullptr) {
        if (policy == LabelPolicy::kStrict) {
          bad_input(lpath, std::string(reason) + " (relation '" + fact.relation_id + "')");
        }
        // doc_id is patched in by the caller once collisions are resolved.
        skipped.push_back({std::to_string(ordinal), l, fact.relation_id, reason});
        continue;
      }
      doc.gold_facts.push_back(std::move(fact));
    }
  }
  return doc;
}

}  // namespace

ParsedCorpus parse_corpus(std::string_view source, const RelationOntology& ontology,
                          LabelPolicy policy) {
  json root;
  try {
    root = json::parse(source);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInput, std::string("corpus: malformed JSON: ") + e.what());
  }
  if (!root.is_array()) throw Error(ErrorCode::kInput, "corpus: expected a JSON array");

  ParsedCorpus out;
  out.documents.reserve(root.size());
  std::unordered_map<std::string, int> title_counts;
  std::vector<size_t> skipped_owner;
  for (size_t i = 0; i < root.size(); ++i) {
    const size_t before = out.skipped_labels.size();
    Document doc = parse_document(root[i], i, ontology, policy, out.skipped_labels);

    if (doc.title.empty()) {
      doc.doc_id = "doc-" + std::to_string(i);
    } else {
      int n = ++title_counts[doc.title];
      doc.doc_id = n == 1 ? doc.title : doc.title + "#" + std::to_string(n);
    }
    for (size_t k = before; k < out.skipped_labels.size(); ++k) {
      out.skipped_labels[k].doc_id = doc.doc_id;
    }
    out.documents.push_back(std::move(doc));
  }
  return out;
}

ParsedCorpus load_corpus(const std::filesystem::path& path, const RelationOntology& ontology,
                         LabelPolicy policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_corpus(buffer.str(), ontology, policy);
}

std::string serialize_corpus(std::span<const Document> docs) {
  nlohmann::ordered_json root = nlohmann::ordered_json::array();
  for (const Document& doc : docs) {
    nlohmann::ordered_json rec;
    rec["title"] = doc.title;
    rec["sents"] = doc.sentences;
    nlohmann::ordered_json vertices = nlohmann::ordered_json::array();
    for (const Entity& e : doc.entities) {
      nlohmann::ordered_json mentions = nlohmann::ordered_json::array();
      for (const Mention& m : e.mentions) {
        mentions.push_back({{"name", m.text},
                            {"sent_id", m.sent_id},
                            {"pos", {m.start, m.end}},
                            {"type", m.type}});
      }
      vertices.push_back(std::move(mentions));
    }
    rec["vertexSet"] = std::move(vertices);
    nlohmann::ordered_json labels = nlohmann::ordered_json::array();
    for (const GoldFact& f : doc.gold_facts) {
      nlohmann::ordered_json label = {{"r", f.relation_id}, {"h", f.head}, {"t", f.tail}};
      if (!f.evidence.empty()) label["evidence"] = f.evidence;
      labels.push_back(std::move(label));
    }
    rec["labels"] = std::move(labels);
    root.push_back(std::move(rec));
  }
  return root.dump();
}

size_t dedup_facts(Document& doc) {
  std::set<std::tuple<int, std::string, int>> seen;
  std::vector<GoldFact> kept;
  kept.reserve(doc.gold_facts.size());
  for (GoldFact& f : doc.gold_facts) {
    if (seen.emplace(f.head, f.relation_id, f.tail).second) kept.push_back(std::move(f));
  }
  const size_t removed = doc.gold_facts.size() - kept.size();
  doc.gold_facts = std::move(kept);
  return removed;
}

InverseReport check_inverse_consistency(Document& doc, const RelationOntology& ontology, bool fix) {
  std::set<std::tuple<int, std::string, int>> present;
  for (const GoldFact& f : doc.gold_facts) present.emplace(f.head, f.relation_id, f.tail);

  InverseReport report;
  std::vector<GoldFact> additions;
  for (const GoldFact& f : doc.gold_facts) {
    const Relation* r = ontology.by_id(f.relation_id);
    if (r == nullptr) continue;
    const Relation* inv = ontology.inverse_of(*r);
    if (inv == nullptr) continue;
    if (present.count({f.tail, inv->id, f.head})) continue;
    report.missing.push_back({f, inv->id});
    if (fix) {
      present.emplace(f.tail, inv->id, f.head);
      additions.push_back({f.tail, f.head, inv->id, f.evidence});
    }
  }
  report.added = additions.size();
  for (GoldFact& f : additions) doc.gold_facts.push_back(std::move(f));
  return report;
}

CorpusStats corpus_stats(std::span<const Document> docs) {
  CorpusStats stats;
  std::set<std::string> relations;
  stats.n_documents = docs.size();
  for (const Document& doc : docs) {
    std::set<std::string> doc_relations;
    for (const GoldFact& f : doc.gold_facts) {
      relations.insert(f.relation_id);
      doc_relations.insert(f.relation_id);
    }
    stats.n_gold_facts += doc.gold_facts.size();
    stats.max_facts_per_doc = std::max(stats.max_facts_per_doc, doc.gold_facts.size());
    stats.max_relations_per_doc = std::max(stats.max_relations_per_doc, doc_relations.size());
  }
  stats.n_distinct_relations = relations.size();
  return stats;
}

}  // namespace docrex
