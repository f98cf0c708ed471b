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

#include <random>

#include "docrex/eval.hpp"
#include "synthetic.hpp"

namespace {

using namespace docrex;

std::vector<PredictedFact> gold_as_predictions(const Document& d, std::mt19937_64& rng) {
  std::vector<PredictedFact> out;
  for (const GoldFact& g : d.gold_facts) {
    const auto& hm = d.entities[g.head].mentions;
    const auto& tm = d.entities[g.tail].mentions;
    out.push_back({d.doc_id, hm[rng() % hm.size()].text, redocred_ontology().by_id(g.relation_id),
                   tm[rng() % tm.size()].text, Paradigm::kDRHF, {}});
  }
  return out;
}

void BM_MatchDocument(benchmark::State& state) {
  const auto docs = testing::synthetic_corpus(
      {.n_docs = 1, .seed = 3, .max_entities = 40, .max_facts = static_cast<size_t>(state.range(0)),
       .empty_doc_rate = 0.0},
      redocred_ontology());
  std::mt19937_64 rng(1);
  const auto preds = gold_as_predictions(docs[0], rng);
  for (auto _ : state) benchmark::DoNotOptimize(match_document(preds, docs[0]));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(preds.size()));
}
BENCHMARK(BM_MatchDocument)->Arg(15)->Arg(60)->Arg(200);

void BM_EvaluateRun(benchmark::State& state) {
  const auto docs = testing::synthetic_corpus({.n_docs = 500, .seed = 4}, redocred_ontology());
  std::mt19937_64 rng(2);
  std::vector<PredictionRecord> records;
  for (const Document& d : docs) {
    for (const PredictedFact& f : gold_as_predictions(d, rng)) {
      records.push_back({f.doc_id, f.head, f.relation->name, f.tail, "drhf"});
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_run(records, docs, redocred_ontology()));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(records.size()));
}
BENCHMARK(BM_EvaluateRun)->Unit(benchmark::kMillisecond);

}  // namespace
