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
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "docrex/backend.hpp"
#include "docrex/corpus.hpp"
#include "docrex/ontology.hpp"
#include "docrex/prompts.hpp"

namespace docrex {

struct PipelineOptions {
  bool with_description = true;
  bool strict_entities = false;
  // Skip relation listing and use the document's gold relations instead.
  bool gold_relation_prior = false;
  PromptStyle style = PromptStyle::kChat;
  // Upper bound on backend calls per document.
  int call_budget = 512;
  DecodeParams decode;
  const PromptSet* prompts = nullptr;  // defaults to PromptSet::builtin()
};

struct PredictedFact {
  std::string doc_id;
  std::string head;
  const Relation* relation = nullptr;
  std::string tail;
  Paradigm paradigm = Paradigm::kDRHF;
  std::vector<int> trace_ids;  // stage records that produced this fact
};

struct StageRecord {
  int id = 0;
  Stage stage = Stage::kRelation;
  RenderedPrompt prompt;
  std::string response;
  std::string backend_id;
  size_t accepted_lines = 0;
  std::vector<RejectedLine> rejected;
  double latency_ms = 0.0;
};

struct ExtractionTrace {
  std::string doc_id;
  Paradigm paradigm = Paradigm::kDRHF;
  std::vector<StageRecord> records;
  size_t n_calls = 0;
  size_t n_rejected_lines = 0;
  bool failed = false;
  bool truncated = false;  // call budget exhausted
  std::string error;
};

struct DocumentRun {
  std::vector<PredictedFact> facts;
  ExtractionTrace trace;
};

// Runs one paradigm on one document.
//   D-F     one call; facts parsed against every ontology relation
//   D-RS-F  relation listing, then one facts call with all relations embedded
//   D-R-F   relation listing, then one facts call per relation
//   D-R-H-F relation listing, one head call per relation, one facts call per
//           (relation, head)
// Facts are deduplicated on (head, relation, tail), first occurrence kept.
// Backend errors mark the trace failed and drop the document's facts; parse
// rejects never abort.
DocumentRun run_paradigm(const Document& doc, Paradigm paradigm, const StageRouting& routing,
                         const RelationOntology& ontology, const PipelineOptions& options);

struct RunSummary {
  Paradigm paradigm = Paradigm::kDRHF;
  size_t n_documents = 0;
  size_t n_failed = 0;
  size_t n_truncated = 0;
  size_t n_predictions = 0;
  size_t n_rejected_lines = 0;
  std::map<Stage, size_t> calls_per_stage;
  std::vector<std::pair<std::string, std::string>> failures;  // (doc_id, error)

  size_t total_calls() const;
};

struct CorpusRun {
  std::vector<DocumentRun> runs;  // corpus order
  RunSummary summary;
};

// Runs up to `parallelism` documents concurrently. Results are returned in
// corpus order regardless of completion order. Throws Error(kInput) when
// parallelism < 1 and Error(kConfig) when routing is incomplete.
CorpusRun run_corpus(std::span<const Document> docs, Paradigm paradigm, const StageRouting& routing,
                     const RelationOntology& ontology, const PipelineOptions& options,
                     int parallelism);

// One JSON object per fact: {doc_id, head, relation, tail, paradigm}.
void write_predictions(std::ostream& out, std::span<const DocumentRun> runs);
// One JSON object per document, records in call order. With
// include_latency = false the output is byte-reproducible.
void write_traces(std::ostream& out, std::span<const DocumentRun> runs, bool include_latency = true);
std::string summary_json(const RunSummary& summary);

// ---------------------------------------------------------------------------
// Stage probes: each stage run in isolation with gold upstream inputs, for
// per-stage scoring.

struct StagePrediction {
  std::string doc_id;
  Stage stage = Stage::kRelation;
  std::string relation;  // relation name
  std::string head;      // head and fact stages
  std::string tail;      // fact stage

  bool operator==(const StagePrediction&) const = default;
};

// relation stage: one relation-listing call.
// head stage: one head call per gold relation.
// fact stage: one fact call per (gold relation, gold head first mention).
std::vector<StagePrediction> run_stage_probe(const Document& doc, Stage stage,
                                             const StageRouting& routing,
                                             const RelationOntology& ontology,
                                             const PipelineOptions& options);

void write_stage_predictions(std::ostream& out, std::span<const StagePrediction> predictions);
std::vector<StagePrediction> read_stage_predictions(std::istream& in);

}  // namespace docrex
