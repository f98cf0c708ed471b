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

#include "docrex/tuningdata.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "docrex/backend.hpp"
#include "docrex/error.hpp"
#include "docrex/text.hpp"
#include "json.hpp"

namespace docrex {

namespace {

TuningSample make_sample(const Document& doc, const RenderedPrompt& prompt, Stage stage,
                         const RelationOntology& ontology, const RequestContext& context) {
  TuningSample s;
  s.stage = stage;
  s.instruction = prompt.text;
  s.output = oracle_answer(doc, stage, context, ontology);
  s.meta.doc_id = doc.doc_id;
  s.meta.relation = context.relation;
  s.meta.subject = context.subject;
  return s;
}

}  // namespace

std::vector<TuningSample> generate_samples(std::span<const Document> docs,
                                           const RelationOntology& ontology,
                                           const TuningOptions& options) {
  const PromptSet& prompts = options.prompts ? *options.prompts : PromptSet::builtin();
  std::mt19937_64 rng(options.seed);
  std::vector<TuningSample> out;

  for (const Document& doc : docs) {
    RequestContext ctx;
    ctx.doc_id = doc.doc_id;
    out.push_back(make_sample(
        doc,
        render_relation_listing_prompt(doc, ontology, RelationListingMode::kOpen, Paradigm::kDRHF, prompts),
        Stage::kRelation, ontology, ctx));

    // relation name -> distinct head texts
    std::map<std::string, std::set<std::string>> heads_by_relation;
    for (const GoldFact& f : doc.gold_facts) {
      const Relation* r = ontology.by_id(f.relation_id);
      if (r == nullptr) continue;
      heads_by_relation[r->name].insert(doc.entities[f.head].canonical());
    }

    for (const auto& [name, heads] : heads_by_relation) {
      const Relation& relation = *ontology.by_name(name);
      RequestContext head_ctx = ctx;
      head_ctx.relation = name;
      out.push_back(make_sample(
          doc, render_head_prompt(doc, relation, options.with_description, PromptStyle::kTuned, prompts),
          Stage::kHead, ontology, head_ctx));
      for (const std::string& head : heads) {
        RequestContext fact_ctx = head_ctx;
        fact_ctx.subject = head;
        out.push_back(make_sample(doc,
                                  render_fact_prompt(doc, relation, head, options.with_description,
                                                     PromptStyle::kTuned, Paradigm::kDRHF, prompts),
                                  Stage::kFact, ontology, fact_ctx));
      }
    }

    if (options.negatives_per_document == 0 || heads_by_relation.empty()) continue;
    std::vector<const Relation*> absent;
    for (const Relation& r : ontology.relations()) {
      if (!heads_by_relation.count(r.name)) absent.push_back(&r);
    }
    // Partial Fisher-Yates with explicit draws, independent of the standard
    // library's shuffle.
    const size_t k = std::min(options.negatives_per_document, absent.size());
    for (size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<size_t> pick(i, absent.size() - 1);
      std::swap(absent[i], absent[pick(rng)]);
    }
    std::sort(absent.begin(), absent.begin() + static_cast<std::ptrdiff_t>(k),
              [](const Relation* a, const Relation* b) { return a->name < b->name; });
    for (size_t i = 0; i < k; ++i) {
      TuningSample s;
      s.stage = Stage::kHead;
      s.instruction =
          render_head_prompt(doc, *absent[i], options.with_description, PromptStyle::kTuned, prompts).text;
      s.output = std::string(kNoRelation);
      s.meta.doc_id = doc.doc_id;
      s.meta.relation = absent[i]->name;
      out.push_back(std::move(s));
    }
  }
  return out;
}

double TuningManifest::share(Stage stage) const {
  if (total() == 0) return 0.0;
  const size_t n = stage == Stage::kRelation ? relation : stage == Stage::kHead ? head : fact;
  return 100.0 * static_cast<double>(n) / static_cast<double>(total());
}

TuningManifest count_samples(std::span<const TuningSample> samples) {
  TuningManifest m;
  for (const TuningSample& s : samples) {
    switch (s.stage) {
      case Stage::kRelation: ++m.relation; break;
      case Stage::kHead: ++m.head; break;
      case Stage::kFact: ++m.fact; break;
    }
  }
  return m;
}

TuningManifest write_samples(std::span<const TuningSample> samples, std::ostream& out) {
  for (const TuningSample& s : samples) {
    nlohmann::ordered_json meta;
    meta["doc_id"] = s.meta.doc_id;
    if (s.meta.relation) meta["relation"] = *s.meta.relation;
    if (s.meta.subject) meta["subject"] = *s.meta.subject;
    nlohmann::ordered_json line;
    line["stage"] = to_string(s.stage);
    line["instruction"] = s.instruction;
    line["output"] = s.output;
    line["meta"] = std::move(meta);
    out << line.dump() << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing tuning samples");
  return count_samples(samples);
}

std::string manifest_json(const TuningManifest& m) {
  nlohmann::ordered_json j;
  j["counts"] = {{"relation", m.relation}, {"head", m.head}, {"fact", m.fact}, {"total", m.total()}};
  j["proportions"] = {{"relation", m.share(Stage::kRelation)},
                      {"head", m.share(Stage::kHead)},
                      {"fact", m.share(Stage::kFact)}};
  return j.dump(2);
}

std::vector<TuningSample> read_samples(std::istream& in) {
  std::vector<TuningSample> out;
  std::string line;
  for (size_t n = 1; std::getline(in, line); ++n) {
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TuningSample s;
      const auto stage = parse_stage(j.at("stage").get<std::string>());
      if (!stage) throw Error(ErrorCode::kInput, "unknown stage");
      s.stage = *stage;
      s.instruction = j.at("instruction").get<std::string>();
      s.output = j.at("output").get<std::string>();
      const auto& meta = j.at("meta");
      s.meta.doc_id = meta.at("doc_id").get<std::string>();
      if (meta.contains("relation")) s.meta.relation = meta["relation"].get<std::string>();
      if (meta.contains("subject")) s.meta.subject = meta["subject"].get<std::string>();
      out.push_back(std::move(s));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kInput, "samples line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace docrex
