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

#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "docrex/corpus.hpp"
#include "docrex/ontology.hpp"
#include "docrex/pipeline.hpp"

namespace docrex {

// Percentages. 0/0 is reported as 0.
struct Scores {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

Scores micro_f1(size_t tp, size_t fp, size_t total_gold);

enum class MatchOutcome { kTruePositive, kFalsePositive, kDuplicate };

struct MatchResult {
  size_t tp = 0;
  size_t fp = 0;
  // Correct predictions whose gold facts were all credited already. They
  // count as neither TP nor FP.
  size_t duplicate_hits = 0;
  std::vector<size_t> matched_gold;     // indices into doc.gold_facts, credit order
  std::vector<MatchOutcome> outcomes;   // one per prediction
};

// Strict alias-aware matching. A prediction fits a gold fact when the
// relation is the same and the head and tail texts each equal one alias of
// the gold head and tail (NFC, trimmed, case-sensitive). Predictions are
// visited in order and credited to the first uncredited gold fact they fit.
MatchResult match_document(std::span<const PredictedFact> predictions, const Document& doc);

struct EvalRow {
  std::string label;
  size_t tp = 0;
  size_t fp = 0;
  size_t duplicate_hits = 0;
  size_t total_gold = 0;

  Scores scores() const { return micro_f1(tp, fp, total_gold); }
};

struct EvalReport {
  EvalRow overall;
  std::vector<EvalRow> per_relation;  // sorted by relation name
  std::vector<EvalRow> per_stage;
  std::map<std::string, std::string> metadata;  // split, paradigm, backend, ...
};

// A line of a predictions file.
struct PredictionRecord {
  std::string doc_id;
  std::string head;
  std::string relation;  // name (or id)
  std::string tail;
  std::string paradigm;
};

// Reads the JSON-lines predictions format. Throws Error(kInput) with the
// line number on malformed input.
std::vector<PredictionRecord> read_predictions(std::istream& in);

// Sums match_document over the corpus. total_gold is the corpus gold count.
// Throws Error(kInput) listing prediction doc_ids absent from the corpus.
EvalReport evaluate_run(std::span<const PredictionRecord> predictions,
                        std::span<const Document> corpus, const RelationOntology& ontology);

// Per-stage scoring with gold upstream inputs:
//   relation  per-document relation sets
//   head      (relation, head alias) against the gold heads of each relation
//   fact      as match_document
EvalReport evaluate_stage(Stage stage, std::span<const StagePrediction> predictions,
                          std::span<const Document> corpus, const RelationOntology& ontology);

struct TableColumn {
  std::string header;
  std::vector<std::string> values;  // one per row
};

// Aligned plain-text table: <first_header>, TP, FP, R, P, F1 (two decimals),
// then any extra columns.
std::string render_table(std::span<const EvalRow> rows, const std::string& first_header = "Paradigm",
                         std::span<const TableColumn> extra = {});

std::string report_json(const EvalReport& report);

}  // namespace docrex
