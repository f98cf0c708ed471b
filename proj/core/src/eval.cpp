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

#include "docrex/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "docrex/error.hpp"
#include "docrex/text.hpp"
#include "json.hpp"

namespace docrex {

Scores micro_f1(size_t tp, size_t fp, size_t total_gold) {
  Scores s;
  if (total_gold > 0) s.recall = 100.0 * static_cast<double>(tp) / static_cast<double>(total_gold);
  if (tp + fp > 0) s.precision = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (s.recall + s.precision > 0) s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

namespace {

using AliasSet = std::unordered_set<std::string>;

AliasSet normalized_aliases(const Entity& entity) {
  AliasSet out;
  for (const Mention& m : entity.mentions) out.insert(text::normalize_alias(m.text));
  return out;
}

// Gold-side lookup structures for one document.
struct GoldIndex {
  std::vector<AliasSet> entity_aliases;
  std::unordered_map<std::string, std::vector<size_t>> facts_by_relation;

  explicit GoldIndex(const Document& doc) {
    entity_aliases.reserve(doc.entities.size());
    for (const Entity& e : doc.entities) entity_aliases.push_back(normalized_aliases(e));
    for (size_t i = 0; i < doc.gold_facts.size(); ++i) {
      facts_by_relation[doc.gold_facts[i].relation_id].push_back(i);
    }
  }
};

// Greedy first-fit crediting shared by fact and head scoring. `fits(p, g)`
// says whether prediction p fits gold item g; `candidates(p)` lists the gold
// items worth testing, in gold order.
template <typename Candidates, typename Fits>
MatchResult greedy_match(size_t n_predictions, size_t n_gold, Candidates candidates, Fits fits) {
  MatchResult result;
  result.outcomes.reserve(n_predictions);
  std::vector<bool> credited(n_gold, false);
  for (size_t p = 0; p < n_predictions; ++p) {
    bool fits_any = false;
    bool matched = false;
    for (size_t g : candidates(p)) {
      if (!fits(p, g)) continue;
      fits_any = true;
      if (!credited[g]) {
        credited[g] = true;
        result.matched_gold.push_back(g);
        matched = true;
        break;
      }
    }
    if (matched) {
      ++result.tp;
      result.outcomes.push_back(MatchOutcome::kTruePositive);
    } else if (fits_any) {
      ++result.duplicate_hits;
      result.outcomes.push_back(MatchOutcome::kDuplicate);
    } else {
      ++result.fp;
      result.outcomes.push_back(MatchOutcome::kFalsePositive);
    }
  }
  return result;
}

const std::vector<size_t>& no_candidates() {
  static const std::vector<size_t> empty;
  return empty;
}

}  // namespace

MatchResult match_document(std::span<const PredictedFact> predictions, const Document& doc) {
  const GoldIndex index(doc);
  std::vector<std::pair<std::string, std::string>> normalized;
  normalized.reserve(predictions.size());
  for (const PredictedFact& p : predictions) {
    normalized.emplace_back(text::normalize_alias(p.head), text::normalize_alias(p.tail));
  }
  auto candidates = [&](size_t p) -> const std::vector<size_t>& {
    if (predictions[p].relation == nullptr) return no_candidates();
    auto it = index.facts_by_relation.find(predictions[p].relation->id);
    return it == index.facts_by_relation.end() ? no_candidates() : it->second;
  };
  auto fits = [&](size_t p, size_t g) {
    const GoldFact& gold = doc.gold_facts[g];
    return index.entity_aliases[gold.head].count(normalized[p].first) &&
           index.entity_aliases[gold.tail].count(normalized[p].second);
  };
  return greedy_match(predictions.size(), doc.gold_facts.size(), candidates, fits);
}

std::vector<PredictionRecord> read_predictions(std::istream& in) {
  std::vector<PredictionRecord> out;
  std::string line;
  for (size_t n = 1; std::getline(in, line); ++n) {
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      PredictionRecord r;
      r.doc_id = j.at("doc_id").get<std::string>();
      r.head = j.at("head").get<std::string>();
      r.relation = j.at("relation").get<std::string>();
      r.tail = j.at("tail").get<std::string>();
      r.paradigm = j.value("paradigm", "");
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInput, "predictions line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

namespace {

const Relation* resolve_predicted(const RelationOntology& ontology, const std::string& name) {
  if (const Relation* r = ontology.resolve(name)) return r;
  return ontology.by_name_ci(name);
}

std::unordered_map<std::string, const Document*> index_corpus(std::span<const Document> corpus) {
  std::unordered_map<std::string, const Document*> out;
  for (const Document& doc : corpus) out.emplace(doc.doc_id, &doc);
  return out;
}

template <typename T, typename GetDocId>
void check_doc_ids(std::span<const T> predictions,
                   const std::unordered_map<std::string, const Document*>& docs, GetDocId get) {
  std::set<std::string> unknown;
  for (const T& p : predictions) {
    if (!docs.count(get(p))) unknown.insert(get(p));
  }
  if (unknown.empty()) return;
  std::string list;
  size_t shown = 0;
  for (const std::string& id : unknown) {
    if (shown++ == 10) {
      list += ", ...";
      break;
    }
    if (!list.empty()) list += ", ";
    list += "'" + id + "'";
  }
  throw Error(ErrorCode::kInput, std::to_string(unknown.size()) +
                                     " prediction doc_id(s) not found in corpus: " + list);
}

void accumulate(EvalRow& row, const MatchResult& m) {
  row.tp += m.tp;
  row.fp += m.fp;
  row.duplicate_hits += m.duplicate_hits;
}

constexpr const char* kUnknownRelation = "<unknown relation>";

}  // namespace

EvalReport evaluate_run(std::span<const PredictionRecord> predictions,
                        std::span<const Document> corpus, const RelationOntology& ontology) {
  const auto docs = index_corpus(corpus);
  check_doc_ids(predictions, docs, [](const PredictionRecord& p) -> const std::string& { return p.doc_id; });

  // Group predictions by document, keeping file order within each document.
  std::unordered_map<std::string, std::vector<PredictedFact>> by_doc;
  std::vector<std::string> doc_order;
  for (const PredictionRecord& p : predictions) {
    auto [it, inserted] = by_doc.try_emplace(p.doc_id);
    if (inserted) doc_order.push_back(p.doc_id);
    it->second.push_back({p.doc_id, p.head, resolve_predicted(ontology, p.relation), p.tail,
                          Paradigm::kDRHF, {}});
  }

  EvalReport report;
  report.overall.label = "all";
  std::map<std::string, EvalRow> per_relation;
  for (const Document& doc : corpus) {
    report.overall.total_gold += doc.gold_facts.size();
    for (const GoldFact& f : doc.gold_facts) {
      const Relation* r = ontology.by_id(f.relation_id);
      ++per_relation[r ? r->name : f.relation_id].total_gold;
    }
  }
  for (const std::string& doc_id : doc_order) {
    const Document& doc = *docs.at(doc_id);
    const std::vector<PredictedFact>& preds = by_doc.at(doc_id);
    const MatchResult m = match_document(preds, doc);
    accumulate(report.overall, m);
    for (size_t i = 0; i < preds.size(); ++i) {
      EvalRow& row = per_relation[preds[i].relation ? preds[i].relation->name : kUnknownRelation];
      switch (m.outcomes[i]) {
        case MatchOutcome::kTruePositive: ++row.tp; break;
        case MatchOutcome::kFalsePositive: ++row.fp; break;
        case MatchOutcome::kDuplicate: ++row.duplicate_hits; break;
      }
    }
  }
  for (auto& [name, row] : per_relation) {
    row.label = name;
    report.per_relation.push_back(row);
  }
  return report;
}

EvalReport evaluate_stage(Stage stage, std::span<const StagePrediction> predictions,
                          std::span<const Document> corpus, const RelationOntology& ontology) {
  const auto docs = index_corpus(corpus);
  check_doc_ids(predictions, docs, [](const StagePrediction& p) -> const std::string& { return p.doc_id; });

  std::unordered_map<std::string, std::vector<const StagePrediction*>> by_doc;
  for (const StagePrediction& p : predictions) {
    if (p.stage != stage) {
      throw Error(ErrorCode::kInput, std::string("expected ") + to_string(stage) +
                                         "-stage predictions, found a " + to_string(p.stage) +
                                         " prediction for '" + p.doc_id + "'");
    }
    by_doc[p.doc_id].push_back(&p);
  }

  EvalRow row;
  row.label = to_string(stage);
  for (const Document& doc : corpus) {
    const auto it = by_doc.find(doc.doc_id);
    const std::vector<const StagePrediction*> empty;
    const auto& preds = it == by_doc.end() ? empty : it->second;

    if (stage == Stage::kRelation) {
      std::set<std::string> gold;
      for (const GoldFact& f : doc.gold_facts) gold.insert(f.relation_id);
      row.total_gold += gold.size();
      std::set<std::string> seen;
      for (const StagePrediction* p : preds) {
        const Relation* r = resolve_predicted(ontology, p->relation);
        const std::string key = r ? r->id : "?" + p->relation;
        if (!seen.insert(key).second) {
          ++row.duplicate_hits;
        } else if (gold.count(key)) {
          ++row.tp;
        } else {
          ++row.fp;
        }
      }
      continue;
    }

    if (stage == Stage::kHead) {
      // Gold items: distinct (relation, head entity) pairs.
      std::vector<std::pair<std::string, int>> gold;
      {
        std::set<std::pair<std::string, int>> distinct;
        for (const GoldFact& f : doc.gold_facts) {
          if (distinct.emplace(f.relation_id, f.head).second) gold.emplace_back(f.relation_id, f.head);
        }
      }
      row.total_gold += gold.size();
      const GoldIndex index(doc);
      std::vector<std::string> rel_ids, heads;
      for (const StagePrediction* p : preds) {
        const Relation* r = resolve_predicted(ontology, p->relation);
        rel_ids.push_back(r ? r->id : "");
        heads.push_back(text::normalize_alias(p->head));
      }
      std::vector<size_t> all(gold.size());
      for (size_t g = 0; g < gold.size(); ++g) all[g] = g;
      const MatchResult m = greedy_match(
          preds.size(), gold.size(), [&](size_t) -> const std::vector<size_t>& { return all; },
          [&](size_t p, size_t g) {
            return !rel_ids[p].empty() && rel_ids[p] == gold[g].first &&
                   index.entity_aliases[gold[g].second].count(heads[p]);
          });
      accumulate(row, m);
      continue;
    }

    row.total_gold += doc.gold_facts.size();
    std::vector<PredictedFact> facts;
    facts.reserve(preds.size());
    for (const StagePrediction* p : preds) {
      facts.push_back({p->doc_id, p->head, resolve_predicted(ontology, p->relation), p->tail,
                       Paradigm::kDRHF, {}});
    }
    accumulate(row, match_document(facts, doc));
  }

  EvalReport report;
  report.overall = row;
  report.per_stage.push_back(row);
  report.metadata["stage"] = to_string(stage);
  return report;
}

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_table(std::span<const EvalRow> rows, const std::string& first_header,
                         std::span<const TableColumn> extra) {
  for (const TableColumn& col : extra) {
    if (col.values.size() != rows.size()) {
      throw Error(ErrorCode::kInput, "table column '" + col.header + "' has " +
                                         std::to_string(col.values.size()) + " values for " +
                                         std::to_string(rows.size()) + " rows");
    }
  }
  std::vector<std::vector<std::string>> cells;
  cells.push_back({first_header, "TP", "FP", "R", "P", "F1"});
  for (const TableColumn& col : extra) cells.back().push_back(col.header);
  for (size_t i = 0; i < rows.size(); ++i) {
    const EvalRow& row = rows[i];
    const Scores s = row.scores();
    cells.push_back({row.label, std::to_string(row.tp), std::to_string(row.fp), fixed2(s.recall),
                     fixed2(s.precision), fixed2(s.f1)});
    for (const TableColumn& col : extra) cells.back().push_back(col.values[i]);
  }
  std::vector<size_t> width(cells.front().size(), 0);
  for (const auto& line : cells) {
    for (size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::ostringstream out;
  for (const auto& line : cells) {
    for (size_t c = 0; c < line.size(); ++c) {
      if (c == 0) {
        out << line[c] << std::string(width[c] - line[c].size(), ' ');
      } else {
        out << "  " << std::string(width[c] - line[c].size(), ' ') << line[c];
      }
    }
    out << '\n';
  }
  return out.str();
}

namespace {

nlohmann::ordered_json row_json(const EvalRow& row) {
  const Scores s = row.scores();
  return {{"label", row.label},
          {"tp", row.tp},
          {"fp", row.fp},
          {"duplicate_hits", row.duplicate_hits},
          {"total_gold", row.total_gold},
          {"recall", s.recall},
          {"precision", s.precision},
          {"f1", s.f1}};
}

}  // namespace

std::string report_json(const EvalReport& report) {
  nlohmann::ordered_json doc;
  doc["metadata"] = report.metadata;
  doc["overall"] = row_json(report.overall);
  doc["per_relation"] = nlohmann::ordered_json::array();
  for (const EvalRow& row : report.per_relation) doc["per_relation"].push_back(row_json(row));
  doc["per_stage"] = nlohmann::ordered_json::array();
  for (const EvalRow& row : report.per_stage) doc["per_stage"].push_back(row_json(row));
  return doc.dump(2);
}

}  // namespace docrex
