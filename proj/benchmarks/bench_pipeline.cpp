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

#include <memory>

#include "docrex/backend.hpp"
#include "docrex/pipeline.hpp"
#include "synthetic.hpp"

namespace {

using namespace docrex;

void BM_OracleCorpusRun(benchmark::State& state) {
  const auto docs = testing::synthetic_corpus({.n_docs = 200, .seed = 12}, redocred_ontology());
  const StageRouting routing(std::make_shared<OracleBackend>(docs, redocred_ontology()));
  const auto paradigm = static_cast<Paradigm>(state.range(0));
  const int parallelism = static_cast<int>(state.range(1));
  size_t calls = 0;
  for (auto _ : state) {
    const CorpusRun run = run_corpus(docs, paradigm, routing, redocred_ontology(), {}, parallelism);
    calls = run.summary.total_calls();
    benchmark::DoNotOptimize(run);
  }
  state.counters["calls"] = static_cast<double>(calls);
  state.SetLabel(display_name(paradigm));
}
BENCHMARK(BM_OracleCorpusRun)
    ->ArgsProduct({{static_cast<int>(Paradigm::kDF), static_cast<int>(Paradigm::kDRHF)}, {1, 4}})
    ->Unit(benchmark::kMillisecond);

}  // namespace
