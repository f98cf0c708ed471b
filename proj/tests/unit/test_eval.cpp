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

#include <algorithm>
#include <random>
#include <sstream>

#include "docrex/error.hpp"
#include "docrex/eval.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace docrex;

namespace {

const RelationOntology& ont() { return redocred_ontology(); }
const Relation* rel(const char* name) { return ont().by_name(name); }

Document us_doc() {
  Document d;
  d.doc_id = "us";
  d.sentences = {{"x"}};
  d.entities = {Entity{{{"U.S.", 0, 0, 1, "LOC"}, {"United States", 0, 0, 1, "LOC"}}},
                Entity{{{"NYC", 0, 0, 1, "LOC"}, {"New York City", 0, 0, 1, "LOC"}}}};
  d.gold_facts = {{1, 0, "P17", {}}};
  return d;
}

PredictedFact pred(std::string head, const Relation* r, std::string tail, std::string doc = "us") {
  return {std::move(doc), std::move(head), r, std::move(tail), Paradigm::kDRHF, {}};
}

PredictionRecord record(std::string doc, std::string head, std::string r, std::string tail) {
  return {std::move(doc), std::move(head), std::move(r), std::move(tail), "drhf"};
}

}  // namespace

TEST_CASE("any alias pair matches") {
  const std::vector<PredictedFact> p = {pred("New York City", rel("country"), "U.S.")};
  const MatchResult m = match_document(p, us_doc());
  CHECK(m.tp == 1);
  CHECK(m.fp == 0);
  CHECK(m.matched_gold == std::vector<size_t>{0});
}

TEST_CASE("alternate aliases of a credited fact are neither TP nor FP") {
  const std::vector<PredictedFact> p = {pred("NYC", rel("country"), "U.S."),
                                        pred("New York City", rel("country"), "United States")};
  const MatchResult m = match_document(p, us_doc());
  CHECK(m.tp == 1);
  CHECK(m.duplicate_hits == 1);
  CHECK(m.fp == 0);
  CHECK(m.outcomes == std::vector<MatchOutcome>{MatchOutcome::kTruePositive, MatchOutcome::kDuplicate});
}

TEST_CASE("strictness") {
  const Document d = us_doc();
  auto single = [&](PredictedFact f) {
    const std::vector<PredictedFact> p = {std::move(f)};
    return match_document(p, d);
  };
  CHECK(single(pred("NYC", rel("capital"), "U.S.")).fp == 1);
  CHECK(single(pred("U.S.", rel("country"), "NYC")).fp == 1);
  CHECK(single(pred("nyc", rel("country"), "U.S.")).fp == 1);
  CHECK(single(pred("NYC", nullptr, "U.S.")).fp == 1);
  CHECK(single(pred("  NYC ", rel("country"), "U.S.\t")).tp == 1);
}

TEST_CASE("aliases compare after NFC") {
  Document d = us_doc();
  d.entities[1].mentions[0].text = "Cafe\xCC\x81";
  const std::vector<PredictedFact> p = {pred("Caf\xC3\xA9", rel("country"), "U.S.")};
  CHECK(match_document(p, d).tp == 1);
}

TEST_CASE("micro_f1") {
  const Scores a = micro_f1(735, 3824, 17448);
  CHECK(std::abs(a.recall - 4.21) <= 0.01);
  CHECK(std::abs(a.precision - 16.12) <= 0.01);
  CHECK(std::abs(a.f1 - 6.68) <= 0.01);
  const Scores z = micro_f1(0, 0, 100);
  CHECK(z.recall == 0);
  CHECK(z.precision == 0);
  CHECK(z.f1 == 0);
  const Scores e = micro_f1(0, 0, 0);
  CHECK(e.f1 == 0);
  const Scores perfect = micro_f1(10, 0, 10);
  CHECK(perfect.f1 == 100.0);
}

TEST_CASE("micro_f1 matches exact rational arithmetic") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5000; ++i) {
    const size_t gold = std::uniform_int_distribution<size_t>(1, 20000)(rng);
    const size_t tp = std::uniform_int_distribution<size_t>(0, gold)(rng);
    const size_t fp = std::uniform_int_distribution<size_t>(0, 40000)(rng);
    const Scores s = micro_f1(tp, fp, gold);
    // F1 = 2 tp / (2 tp + fp + fn) when tp > 0.
    const double f1 = tp == 0 ? 0.0 : 100.0 * 2.0 * tp / (2.0 * tp + fp + (gold - tp));
    CHECK(s.f1 == doctest::Approx(f1).epsilon(1e-12));
    CHECK(s.recall == doctest::Approx(100.0 * tp / gold).epsilon(1e-12));
  }
}

TEST_CASE("micro_f1 is monotone in tp") {
  for (size_t fp : {0, 1, 10, 1000}) {
    double last = -1;
    for (size_t tp = 0; tp <= 200; ++tp) {
      const double f1 = micro_f1(tp, fp, 200).f1;
      CHECK(f1 >= last);
      last = f1;
    }
  }
}

TEST_CASE("match_document agrees with the reference matcher on random instances") {
  std::mt19937_64 rng(17);
  const std::vector<Document> docs =
      testing::synthetic_corpus({.n_docs = 200, .seed = 9, .shared_alias_rate = 0.3}, ont());
  for (const Document& d : docs) {
    std::vector<PredictedFact> preds;
    for (const GoldFact& g : d.gold_facts) {
      const auto& hm = d.entities[g.head].mentions;
      const auto& tm = d.entities[g.tail].mentions;
      for (int k = std::uniform_int_distribution<int>(0, 2)(rng); k > 0; --k) {
        preds.push_back(pred(hm[rng() % hm.size()].text, ont().by_id(g.relation_id), tm[rng() % tm.size()].text,
                             d.doc_id));
      }
    }
    std::shuffle(preds.begin(), preds.end(), rng);
    const MatchResult m = match_document(preds, d);
    const testing::MatchTotals ref = testing::brute_force_match(preds, d);
    CHECK(m.tp == ref.tp);
    CHECK(m.fp == ref.fp);
    CHECK(m.duplicate_hits == ref.duplicate_hits);
    CHECK(m.tp + m.fp + m.duplicate_hits == preds.size());
    CHECK(m.tp == m.matched_gold.size());
    CHECK(m.tp <= std::min(preds.size(), d.gold_facts.size()));
    CHECK(m.tp <= testing::optimal_tp(preds, d));
  }
}

TEST_CASE("duplicating a credited prediction leaves the scores unchanged") {
  const std::vector<Document> docs = testing::synthetic_corpus({.n_docs = 50, .seed = 4}, ont());
  for (const Document& d : docs) {
    if (d.gold_facts.empty()) continue;
    std::vector<PredictedFact> preds;
    for (const GoldFact& g : d.gold_facts) {
      preds.push_back(pred(d.entities[g.head].canonical(), ont().by_id(g.relation_id), d.entities[g.tail].canonical(),
                           d.doc_id));
    }
    preds.push_back(pred("nobody", ont().by_id("P17"), "nowhere", d.doc_id));
    const MatchResult before = match_document(preds, d);
    preds.push_back(preds.front());
    const MatchResult after = match_document(preds, d);
    CHECK(before.tp == after.tp);
    CHECK(before.fp == after.fp);
    CHECK(after.duplicate_hits == before.duplicate_hits + 1);
  }
}

TEST_CASE("evaluate_run sums documents and totals every gold fact") {
  const std::vector<Document> docs = {us_doc()};
  const std::vector<PredictionRecord> preds = {record("us", "NYC", "country", "U.S."),
                                               record("us", "NYC", "capital", "U.S."),
                                               record("us", "NYC", "made up", "U.S.")};
  const EvalReport r = evaluate_run(preds, docs, ont());
  CHECK(r.overall.tp == 1);
  CHECK(r.overall.fp == 2);
  CHECK(r.overall.total_gold == 1);
  auto row = [&](const std::string& label) {
    return *std::find_if(r.per_relation.begin(), r.per_relation.end(), [&](const EvalRow& x) { return x.label == label; });
  };
  CHECK(row("country").tp == 1);
  CHECK(row("country").total_gold == 1);
  CHECK(row("capital").fp == 1);
  CHECK(row("capital").total_gold == 0);
  CHECK(r.per_relation.size() == 3);

  const EvalReport empty = evaluate_run({}, docs, ont());
  CHECK(empty.overall.tp == 0);
  CHECK(empty.overall.fp == 0);
  CHECK(empty.overall.total_gold == 1);
}

TEST_CASE("evaluate_run names unknown documents") {
  const std::vector<Document> docs = {us_doc()};
  const std::vector<PredictionRecord> preds = {record("ghost", "a", "country", "b")};
  try {
    evaluate_run(preds, docs, ont());
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInput);
    CHECK(std::string(e.what()).find("'ghost'") != std::string::npos);
  }
}

TEST_CASE("relation stage scores relation sets") {
  Document d = us_doc();
  d.gold_facts = {{0, 1, "P17", {}}, {1, 0, "P131", {}}, {1, 0, "P17", {}}};
  const std::vector<Document> docs = {d};
  const std::vector<StagePrediction> preds = {{"us", Stage::kRelation, "country", "", ""},
                                              {"us", Stage::kRelation, "capital", "", ""},
                                              {"us", Stage::kRelation, "country", "", ""}};
  const EvalRow row = evaluate_stage(Stage::kRelation, preds, docs, ont()).overall;
  CHECK(row.tp == 1);
  CHECK(row.fp == 1);
  CHECK(row.duplicate_hits == 1);
  CHECK(row.total_gold == 2);
}

TEST_CASE("head stage scores (relation, head alias) pairs") {
  Document d = us_doc();
  d.gold_facts = {{1, 0, "P17", {}}, {0, 1, "P17", {}}, {1, 0, "P131", {}}};
  const std::vector<Document> docs = {d};
  const std::vector<StagePrediction> preds = {{"us", Stage::kHead, "country", "New York City", ""},
                                              {"us", Stage::kHead, "country", "NYC", ""},
                                              {"us", Stage::kHead, "country", "Boston", ""},
                                              {"us", Stage::kHead, "capital", "NYC", ""}};
  const EvalRow row = evaluate_stage(Stage::kHead, preds, docs, ont()).overall;
  CHECK(row.total_gold == 3);
  CHECK(row.tp == 1);
  CHECK(row.duplicate_hits == 1);
  CHECK(row.fp == 2);
  const std::vector<StagePrediction> wrong_stage = {{"us", Stage::kFact, "country", "a", "b"}};
  CHECK_THROWS_AS(evaluate_stage(Stage::kHead, wrong_stage, docs, ont()), Error);
}

TEST_CASE("table and JSON rendering") {
  const std::vector<EvalRow> rows = {{"D-F", 735, 3824, 0, 17448}, {"D-RS-F", 867, 4811, 0, 17448}};
  const std::string table = render_table(rows);
  CHECK(table ==
        "Paradigm   TP    FP     R      P    F1\n"
        "D-F       735  3824  4.21  16.12  6.68\n"
        "D-RS-F    867  4811  4.97  15.27  7.50\n");
  const TableColumn calls{"Calls", {"1", "22"}};
  const std::vector<TableColumn> extra = {calls};
  CHECK(render_table(rows, "Paradigm", extra).find("Calls") != std::string::npos);
  const std::vector<TableColumn> short_col = {{"X", {"1"}}};
  CHECK_THROWS_AS(render_table(rows, "Paradigm", short_col), Error);

  EvalReport report;
  report.overall = rows[0];
  report.metadata["split"] = "test";
  const auto j = nlohmann::json::parse(report_json(report));
  CHECK(j["overall"]["tp"] == 735);
  CHECK(j["overall"]["f1"].get<double>() == doctest::Approx(6.6797).epsilon(1e-4));
  CHECK(j["metadata"]["split"] == "test");
}

TEST_CASE("prediction file reader") {
  std::istringstream ok(
      "{\"doc_id\":\"a\",\"head\":\"h\",\"relation\":\"country\",\"tail\":\"t\",\"paradigm\":\"df\"}\n\n"
      "{\"doc_id\":\"b\",\"head\":\"h\",\"relation\":\"P17\",\"tail\":\"t\"}\n");
  const auto recs = read_predictions(ok);
  REQUIRE(recs.size() == 2);
  CHECK(recs[1].relation == "P17");
  std::istringstream bad("{\"doc_id\":\"a\"}\n");
  try {
    read_predictions(bad);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
}
