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

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "docrex/corpus.hpp"
#include "docrex/ontology.hpp"
#include "docrex/prompts.hpp"

namespace docrex {

struct SampleMeta {
  std::string doc_id;
  std::optional<std::string> relation;  // head and fact samples
  std::optional<std::string> subject;   // fact samples
};

struct TuningSample {
  Stage stage = Stage::kRelation;
  std::string instruction;
  std::string output;
  SampleMeta meta;
};

struct TuningOptions {
  bool with_description = true;
  // Experimental: per document with facts, add this many head samples for
  // relations absent from the document, answered with "no relation".
  size_t negatives_per_document = 0;
  uint64_t seed = 0;
  const PromptSet* prompts = nullptr;  // builtin when null
};

// Per document: one relation sample, one head sample per gold relation, one
// fact sample per (gold relation, distinct head text). Outputs are what the
// oracle backend answers for the same request. Order: corpus order, then
// relation name, then head.
std::vector<TuningSample> generate_samples(std::span<const Document> docs,
                                           const RelationOntology& ontology,
                                           const TuningOptions& options = {});

struct TuningManifest {
  size_t relation = 0;
  size_t head = 0;
  size_t fact = 0;

  size_t total() const { return relation + head + fact; }
  // Percent of all samples; 0 when there are none.
  double share(Stage stage) const;
};

TuningManifest count_samples(std::span<const TuningSample> samples);

// JSON lines {stage, instruction, output, meta}. Returns the manifest.
TuningManifest write_samples(std::span<const TuningSample> samples, std::ostream& out);

std::string manifest_json(const TuningManifest& manifest);

// Reads back the format produced by write_samples.
std::vector<TuningSample> read_samples(std::istream& in);

}  // namespace docrex
