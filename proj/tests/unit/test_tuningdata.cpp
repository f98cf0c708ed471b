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

#include <map>
#include <sstream>

#include "docrex/backend.hpp"
#include "docrex/error.hpp"
#include "docrex/tuningdata.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace docrex;

namespace {

const RelationOntology& ont() { return redocred_ontology(); }

Document ab_doc() {
  Document d;
  d.doc_id = "ab";
  d.sentences = {{"A", "B", "C", "D"}};
  d.entities = {Entity{{{"A", 0, 0, 1, "ORG"}}}, Entity{{{"B", 0, 1, 2, "LOC"}}},
                Entity{{{"C", 0, 2, 3, "LOC"}}}, Entity{{{"D", 0, 3, 4, "LOC"}}}};
  // country: A->B, A->C, D->B ; located in: A->D
  d.gold_facts = {{0, 1, "P17", {}}, {0, 2, "P17", {}}, {3, 1, "P17", {}}, {0, 3, "P131", {}}};
  return d;
}

std::string write(const std::vector<TuningSample>& samples) {
  std::ostringstream out;
  write_samples(samples, out);
  return out.str();
}

}  // namespace

TEST_CASE("one sample per relation, head set and (relation, head)") {
  const std::vector<Document> docs = {ab_doc()};
  const auto samples = generate_samples(docs, ont());
  const TuningManifest m = count_samples(samples);
  CHECK(m.relation == 1);
  CHECK(m.head == 2);
  CHECK(m.fact == 3);
  REQUIRE(samples.size() == 6);
  CHECK(samples[0].stage == Stage::kRelation);
  CHECK(samples[0].output == "country\nlocated in the administrative territorial entity");
  CHECK(samples[1].stage == Stage::kHead);
  CHECK(samples[1].meta.relation == "country");
  CHECK(samples[1].output == "A\nD");
  CHECK(samples[2].stage == Stage::kFact);
  CHECK(samples[2].meta.subject == "A");
  CHECK(samples[2].output == "[A, country, B]\n[A, country, C]");
  CHECK(samples[3].meta.subject == "D");
  CHECK(samples[4].stage == Stage::kHead);
  CHECK(samples[4].output == "A");
}

TEST_CASE("a document without facts gives one relation sample") {
  Document d = ab_doc();
  d.gold_facts.clear();
  const std::vector<Document> docs = {d};
  const auto samples = generate_samples(docs, ont());
  REQUIRE(samples.size() == 1);
  CHECK(samples[0].output == "no relation");
  CHECK(samples[0].meta.doc_id == "ab");
  CHECK_FALSE(samples[0].meta.relation.has_value());
}

TEST_CASE("sample counts follow the counting law") {
  for (uint64_t seed : {1, 2, 3, 4}) {
    const testing::SyntheticOptions opts{.n_docs = 120, .seed = seed, .shared_alias_rate = 0.2};
    const nlohmann::json raw = testing::synthetic_corpus_json(opts, ont());
    const std::vector<Document> docs = testing::synthetic_corpus(opts, ont());
    const TuningManifest m = count_samples(generate_samples(docs, ont()));
    const testing::SampleCounts want = testing::expected_sample_counts(raw);
    CHECK(m.relation == want.relation);
    CHECK(m.head == want.head);
    CHECK(m.fact == want.fact);
  }
}

TEST_CASE("outputs are what the oracle answers") {
  const std::vector<Document> docs = testing::synthetic_corpus({.n_docs = 60, .seed = 11}, ont());
  std::map<std::string, const Document*> by_id;
  for (const Document& d : docs) by_id[d.doc_id] = &d;
  for (const TuningSample& s : generate_samples(docs, ont())) {
    RequestContext ctx{s.meta.doc_id, s.meta.relation, s.meta.subject, {}};
    CHECK(oracle_answer(*by_id.at(s.meta.doc_id), s.stage, ctx, ont()) == s.output);
  }
}

TEST_CASE("every gold fact appears in exactly one fact sample") {
  const std::vector<Document> docs = testing::synthetic_corpus({.n_docs = 60, .seed = 12}, ont());
  const auto samples = generate_samples(docs, ont());
  for (const Document& d : docs) {
    for (const GoldFact& g : d.gold_facts) {
      const std::string line =
          format_fact(d.entities[g.head].canonical(), ont().by_id(g.relation_id)->name, d.entities[g.tail].canonical());
      size_t hits = 0;
      for (const TuningSample& s : samples) {
        if (s.stage != Stage::kFact || s.meta.doc_id != d.doc_id) continue;
        const std::string padded = "\n" + s.output + "\n";
        if (padded.find("\n" + line + "\n") != std::string::npos) ++hits;
      }
      CHECK(hits == 1);
    }
  }
}

TEST_CASE("instructions carry the description flag") {
  const std::vector<Document> docs = {ab_doc()};
  const Relation* country = ont().by_name("country");
  const auto with = generate_samples(docs, ont(), {.with_description = true});
  const auto without = generate_samples(docs, ont(), {.with_description = false});
  CHECK(with[1].instruction.find(country->description) != std::string::npos);
  CHECK(without[1].instruction.find(country->description) == std::string::npos);
  CHECK(with[0].instruction == without[0].instruction);
}

TEST_CASE("generation is deterministic and round trips") {
  const std::vector<Document> docs = testing::synthetic_corpus({.n_docs = 40, .seed = 5}, ont());
  const std::string a = write(generate_samples(docs, ont()));
  const std::string b = write(generate_samples(docs, ont()));
  CHECK(a == b);
  std::istringstream in(a);
  const auto back = read_samples(in);
  CHECK(write(back) == a);
}

TEST_CASE("manifest") {
  const TuningManifest empty;
  CHECK(empty.total() == 0);
  CHECK(empty.share(Stage::kFact) == 0.0);
  const TuningManifest m{1, 2, 7};
  CHECK(m.share(Stage::kFact) == doctest::Approx(70.0));
  const auto j = nlohmann::json::parse(manifest_json(m));
  CHECK(j["counts"]["total"] == 10);
  CHECK(j["proportions"]["head"].get<double>() == doctest::Approx(20.0));
}

TEST_CASE("negatives are seeded and answered with the sentinel") {
  const std::vector<Document> docs = testing::synthetic_corpus({.n_docs = 30, .seed = 6}, ont());
  TuningOptions opts;
  opts.negatives_per_document = 2;
  opts.seed = 99;
  const auto a = generate_samples(docs, ont(), opts);
  CHECK(write(a) == write(generate_samples(docs, ont(), opts)));
  opts.seed = 100;
  CHECK(write(a) != write(generate_samples(docs, ont(), opts)));

  size_t with_facts = 0;
  for (const Document& d : docs) with_facts += d.gold_facts.empty() ? 0 : 1;
  const TuningManifest plain = count_samples(generate_samples(docs, ont()));
  CHECK(count_samples(a).head == plain.head + 2 * with_facts);
  std::map<std::string, const Document*> by_id;
  for (const Document& d : docs) by_id[d.doc_id] = &d;
  for (const TuningSample& s : a) {
    if (s.stage != Stage::kHead || s.output != "no relation") continue;
    const Relation* r = ont().by_name(*s.meta.relation);
    for (const GoldFact& g : by_id.at(s.meta.doc_id)->gold_facts) CHECK(g.relation_id != r->id);
  }
}

TEST_CASE("write failures and malformed input") {
  std::ostringstream out;
  out.setstate(std::ios::badbit);
  const std::vector<Document> docs = {ab_doc()};
  CHECK_THROWS_AS(write_samples(generate_samples(docs, ont()), out), Error);
  std::istringstream bad("{\"stage\":\"nope\"}\n");
  CHECK_THROWS_AS(read_samples(bad), Error);
}
