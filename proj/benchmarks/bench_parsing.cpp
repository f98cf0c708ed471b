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

#include "docrex/prompts.hpp"
#include "synthetic.hpp"

namespace {

using namespace docrex;

std::string fact_response(const Relation& r, size_t lines) {
  std::mt19937_64 rng(5);
  std::string raw;
  for (size_t i = 0; i < lines; ++i) {
    raw += format_fact(testing::random_name(rng, true), r.name, testing::random_name(rng, true));
    raw += '\n';
  }
  return raw;
}

void BM_ParseFactList(benchmark::State& state) {
  const Relation& r = *redocred_ontology().by_id("P131");
  const std::string raw = fact_response(r, static_cast<size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parse_fact_list(raw, r, std::nullopt, "", false));
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(raw.size()));
}
BENCHMARK(BM_ParseFactList)->Arg(10)->Arg(100);

void BM_ParseFactListAny(benchmark::State& state) {
  const Relation& r = *redocred_ontology().by_id("P131");
  const std::string raw = fact_response(r, static_cast<size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parse_fact_list_any(raw, redocred_ontology(), "", false));
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(raw.size()));
}
BENCHMARK(BM_ParseFactListAny)->Arg(10)->Arg(100);

void BM_ParseRelationList(benchmark::State& state) {
  std::string raw;
  for (const Relation& r : redocred_ontology().relations()) raw += "- " + r.name + "\n";
  for (auto _ : state) benchmark::DoNotOptimize(parse_relation_list(raw, redocred_ontology()));
}
BENCHMARK(BM_ParseRelationList);

}  // namespace
