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

#include <benchmark/benchmark.h>

#include "docrex/prompts.hpp"
#include "synthetic.hpp"

namespace {

using namespace docrex;

const Document& doc() {
  static const auto docs = testing::synthetic_corpus({.n_docs = 1, .seed = 8, .empty_doc_rate = 0.0},
                                                     redocred_ontology());
  return docs[0];
}

void BM_RenderRelationListing(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        render_relation_listing_prompt(doc(), redocred_ontology(), RelationListingMode::kWithCandidates));
  }
}
BENCHMARK(BM_RenderRelationListing);

void BM_RenderFactPrompt(benchmark::State& state) {
  const Relation& r = *redocred_ontology().by_id("P17");
  const std::optional<std::string> subject = doc().entities[0].canonical();
  for (auto _ : state) benchmark::DoNotOptimize(render_fact_prompt(doc(), r, subject, true));
}
BENCHMARK(BM_RenderFactPrompt);

void BM_RenderDirectFacts(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(render_direct_facts_prompt(doc(), redocred_ontology()));
}
BENCHMARK(BM_RenderDirectFacts);

}  // namespace
