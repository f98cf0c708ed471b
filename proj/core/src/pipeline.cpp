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

#include "docrex/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <set>
#include <thread>
#include <tuple>

#include "docrex/error.hpp"
#include "docrex/text.hpp"
#include "json.hpp"

namespace docrex {

using nlohmann::ordered_json;

size_t RunSummary::total_calls() const {
  size_t n = 0;
  for (const auto& [stage, calls] : calls_per_stage) n += calls;
  return n;
}

namespace {

struct BudgetExhausted {};

class DocumentRunner {
 public:
  DocumentRunner(const Document& doc, Paradigm paradigm, const StageRouting& routing,
                 const RelationOntology& ontology, const PipelineOptions& options)
      : doc_(doc),
        paradigm_(paradigm),
        routing_(routing),
        ontology_(ontology),
        options_(options),
        prompts_(options.prompts ? *options.prompts : PromptSet::builtin()),
        passage_(doc.passage()) {
    run_.trace.doc_id = doc.doc_id;
    run_.trace.paradigm = paradigm;
  }

  DocumentRun run() {
    try {
      switch (paradigm_) {
        case Paradigm::kDF: run_direct(); break;
        case Paradigm::kDRSF: run_relation_set(); break;
        case Paradigm::kDRF: run_per_relation(); break;
        case Paradigm::kDRHF: run_relation_head_fact(); break;
      }
    } catch (const BudgetExhausted&) {
      run_.trace.truncated = true;
    } catch (const std::exception& e) {
      run_.trace.failed = true;
      run_.trace.error = e.what();
      run_.facts.clear();
    }
    return std::move(run_);
  }

 private:
  // Issues one backend call and records it. Returns the record index.
  size_t call(RenderedPrompt prompt, RequestContext context) {
    if (static_cast<int>(run_.trace.n_calls) >= options_.call_budget) throw BudgetExhausted{};
    ChatRequest request;
    request.prompt = prompt.text;
    request.stage = prompt.stage;
    request.decode = options_.decode;
    context.doc_id = doc_.doc_id;
    request.context = std::move(context);

    const auto started = std::chrono::steady_clock::now();
    BackendResponse response = chat(request, routing_);
    const double elapsed =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

    StageRecord record;
    record.id = static_cast<int>(run_.trace.records.size());
    record.stage = prompt.stage;
    record.prompt = std::move(prompt);
    record.response = std::move(response.text);
    record.backend_id = std::move(response.backend_id);
    record.latency_ms = response.latency_ms > 0 ? response.latency_ms : elapsed;
    run_.trace.records.push_back(std::move(record));
    ++run_.trace.n_calls;
    return run_.trace.records.size() - 1;
  }

  template <typename T>
  void note(size_t record_index, const ParseOutcome<T>& outcome) {
    StageRecord& record = run_.trace.records[record_index];
    record.accepted_lines = outcome.accepted_lines;
    record.rejected = outcome.rejected;
    run_.trace.n_rejected_lines += outcome.rejected.size();
  }

  void emit(const std::vector<ParsedFact>& facts, std::vector<int> trace_ids) {
    for (const ParsedFact& f : facts) {
      if (!seen_.emplace(f.head, f.relation, f.tail).second) continue;
      run_.facts.push_back({doc_.doc_id, f.head, f.relation, f.tail, paradigm_, trace_ids});
    }
  }

  // Relation listing (or the gold relations under gold_relation_prior).
  // Returns the relations and the id of the listing call, or -1.
  std::pair<std::vector<const Relation*>, int> list_relations() {
    if (options_.gold_relation_prior) {
      std::set<std::string> names;
      for (const GoldFact& f : doc_.gold_facts) {
        if (const Relation* r = ontology_.by_id(f.relation_id)) names.insert(r->name);
      }
      std::vector<const Relation*> relations;
      for (const std::string& name : names) relations.push_back(ontology_.by_name(name));
      return {relations, -1};
    }
    const auto mode = options_.style == PromptStyle::kChat ? RelationListingMode::kWithCandidates
                                                           : RelationListingMode::kOpen;
    const size_t id =
        call(render_relation_listing_prompt(doc_, ontology_, mode, paradigm_, prompts_), {});
    auto parsed = parse_relation_list(run_.trace.records[id].response, ontology_);
    note(id, parsed);
    return {std::move(parsed.value), static_cast<int>(id)};
  }

  static std::vector<int> ids(std::initializer_list<int> list) {
    std::vector<int> out;
    for (int i : list) {
      if (i >= 0) out.push_back(i);
    }
    return out;
  }

  void run_direct() {
    const size_t id = call(render_direct_facts_prompt(doc_, ontology_, prompts_), {});
    auto parsed = parse_fact_list_any(run_.trace.records[id].response, ontology_, passage_,
                                      options_.strict_entities);
    note(id, parsed);
    emit(parsed.value, ids({static_cast<int>(id)}));
  }

  void run_relation_set() {
    auto [relations, listing] = list_relations();
    if (relations.empty()) return;
    RequestContext context;
    for (const Relation* r : relations) context.relation_set.push_back(r->name);
    const size_t id = call(render_relation_set_facts_prompt(doc_, relations, prompts_), context);
    auto parsed = parse_fact_list_any(run_.trace.records[id].response, ontology_, passage_,
                                      options_.strict_entities);
    note(id, parsed);
    emit(parsed.value, ids({listing, static_cast<int>(id)}));
  }

  void run_per_relation() {
    auto [relations, listing] = list_relations();
    for (const Relation* r : relations) {
      RequestContext context;
      context.relation = r->name;
      const size_t id = call(render_fact_prompt(doc_, *r, std::nullopt, options_.with_description,
                                                options_.style, Paradigm::kDRF, prompts_),
                             context);
      auto parsed = parse_fact_list(run_.trace.records[id].response, *r, std::nullopt, passage_,
                                    options_.strict_entities);
      note(id, parsed);
      emit(parsed.value, ids({listing, static_cast<int>(id)}));
    }
  }

  void run_relation_head_fact() {
    auto [relations, listing] = list_relations();
    for (const Relation* r : relations) {
      RequestContext head_context;
      head_context.relation = r->name;
      const size_t head_id = call(
          render_head_prompt(doc_, *r, options_.with_description, options_.style, prompts_),
          head_context);
      auto heads = parse_entity_list(run_.trace.records[head_id].response, passage_,
                                     options_.strict_entities);
      note(head_id, heads);
      for (const std::string& head : heads.value) {
        RequestContext fact_context;
        fact_context.relation = r->name;
        fact_context.subject = head;
        const size_t fact_id = call(render_fact_prompt(doc_, *r, head, options_.with_description,
                                                       options_.style, Paradigm::kDRHF, prompts_),
                                    fact_context);
        auto facts = parse_fact_list(run_.trace.records[fact_id].response, *r, head, passage_,
                                     options_.strict_entities);
        note(fact_id, facts);
        emit(facts.value, ids({listing, static_cast<int>(head_id), static_cast<int>(fact_id)}));
      }
    }
  }

  const Document& doc_;
  Paradigm paradigm_;
  const StageRouting& routing_;
  const RelationOntology& ontology_;
  const PipelineOptions& options_;
  const PromptSet& prompts_;
  const std::string passage_;
  DocumentRun run_;
  std::set<std::tuple<std::string, const Relation*, std::string>> seen_;
};

}  // namespace

DocumentRun run_paradigm(const Document& doc, Paradigm paradigm, const StageRouting& routing,
                         const RelationOntology& ontology, const PipelineOptions& options) {
  return DocumentRunner(doc, paradigm, routing, ontology, options).run();
}

CorpusRun run_corpus(std::span<const Document> docs, Paradigm paradigm, const StageRouting& routing,
                     const RelationOntology& ontology, const PipelineOptions& options,
                     int parallelism) {
  if (parallelism < 1) throw Error(ErrorCode::kInput, "parallelism must be >= 1");
  routing.validate();

  CorpusRun out;
  out.runs.resize(docs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < docs.size(); i = next++) {
      out.runs[i] = run_paradigm(docs[i], paradigm, routing, ontology, options);
    }
  };
  const size_t n_threads = std::min<size_t>(static_cast<size_t>(parallelism), docs.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  RunSummary& s = out.summary;
  s.paradigm = paradigm;
  s.n_documents = docs.size();
  for (Stage stage : {Stage::kRelation, Stage::kHead, Stage::kFact}) s.calls_per_stage[stage] = 0;
  for (const DocumentRun& run : out.runs) {
    for (const StageRecord& record : run.trace.records) ++s.calls_per_stage[record.stage];
    s.n_predictions += run.facts.size();
    s.n_rejected_lines += run.trace.n_rejected_lines;
    if (run.trace.truncated) ++s.n_truncated;
    if (run.trace.failed) {
      ++s.n_failed;
      s.failures.emplace_back(run.trace.doc_id, run.trace.error);
    }
  }
  return out;
}

void write_predictions(std::ostream& out, std::span<const DocumentRun> runs) {
  for (const DocumentRun& run : runs) {
    for (const PredictedFact& f : run.facts) {
      ordered_json line = {{"doc_id", f.doc_id},
                           {"head", f.head},
                           {"relation", f.relation ? f.relation->name : ""},
                           {"tail", f.tail},
                           {"paradigm", to_string(f.paradigm)}};
      out << line.dump() << '\n';
    }
  }
}

void write_traces(std::ostream& out, std::span<const DocumentRun> runs, bool include_latency) {
  for (const DocumentRun& run : runs) {
    const ExtractionTrace& t = run.trace;
    ordered_json records = ordered_json::array();
    for (const StageRecord& r : t.records) {
      ordered_json rejected = ordered_json::array();
      for (const RejectedLine& line : r.rejected) {
        rejected.push_back({{"line", line.line}, {"reason", to_string(line.reason)}});
      }
      ordered_json slots = ordered_json::object();
      for (const auto& [k, v] : r.prompt.slots) slots[k] = v;
      ordered_json rec = {{"id", r.id},
                          {"stage", to_string(r.stage)},
                          {"template", r.prompt.template_name},
                          {"slots", std::move(slots)},
                          {"prompt", r.prompt.text},
                          {"response", r.response},
                          {"backend_id", r.backend_id},
                          {"accepted_lines", r.accepted_lines},
                          {"rejected", std::move(rejected)}};
      if (include_latency) rec["latency_ms"] = r.latency_ms;
      records.push_back(std::move(rec));
    }
    ordered_json line = {{"doc_id", t.doc_id},
                         {"paradigm", to_string(t.paradigm)},
                         {"n_calls", t.n_calls},
                         {"n_rejected_lines", t.n_rejected_lines},
                         {"failed", t.failed},
                         {"truncated", t.truncated}};
    if (t.failed) line["error"] = t.error;
    line["records"] = std::move(records);
    out << line.dump() << '\n';
  }
}

std::string summary_json(const RunSummary& s) {
  ordered_json calls = ordered_json::object();
  for (const auto& [stage, n] : s.calls_per_stage) calls[to_string(stage)] = n;
  calls["total"] = s.total_calls();
  ordered_json failures = ordered_json::array();
  for (const auto& [doc_id, error] : s.failures) {
    failures.push_back({{"doc_id", doc_id}, {"error", error}});
  }
  ordered_json doc = {{"paradigm", to_string(s.paradigm)},
                      {"n_documents", s.n_documents},
                      {"n_failed", s.n_failed},
                      {"n_truncated", s.n_truncated},
                      {"n_predictions", s.n_predictions},
                      {"n_rejected_lines", s.n_rejected_lines},
                      {"calls", std::move(calls)},
                      {"failures", std::move(failures)}};
  return doc.dump(2);
}

// ---------------------------------------------------------------------------

std::vector<StagePrediction> run_stage_probe(const Document& doc, Stage stage,
                                             const StageRouting& routing,
                                             const RelationOntology& ontology,
                                             const PipelineOptions& options) {
  const PromptSet& prompts = options.prompts ? *options.prompts : PromptSet::builtin();
  const std::string passage = doc.passage();
  auto ask = [&](RenderedPrompt prompt, RequestContext context) {
    ChatRequest request;
    request.prompt = std::move(prompt.text);
    request.stage = prompt.stage;
    request.decode = options.decode;
    context.doc_id = doc.doc_id;
    request.context = std::move(context);
    return chat(request, routing).text;
  };

  std::vector<StagePrediction> out;
  if (stage == Stage::kRelation) {
    const auto mode = options.style == PromptStyle::kChat ? RelationListingMode::kWithCandidates
                                                          : RelationListingMode::kOpen;
    auto parsed = parse_relation_list(
        ask(render_relation_listing_prompt(doc, ontology, mode, Paradigm::kDRHF, prompts), {}),
        ontology);
    for (const Relation* r : parsed.value) out.push_back({doc.doc_id, stage, r->name, "", ""});
    return out;
  }

  // Gold upstream: relations sorted by name, heads by first-mention text.
  std::map<std::string, std::set<std::string>> heads_by_relation;
  for (const GoldFact& f : doc.gold_facts) {
    if (const Relation* r = ontology.by_id(f.relation_id)) {
      heads_by_relation[r->name].insert(doc.entities[f.head].canonical());
    }
  }
  for (const auto& [name, heads] : heads_by_relation) {
    const Relation& r = *ontology.by_name(name);
    RequestContext context;
    context.relation = name;
    if (stage == Stage::kHead) {
      auto parsed = parse_entity_list(
          ask(render_head_prompt(doc, r, options.with_description, options.style, prompts), context),
          passage, options.strict_entities);
      for (const std::string& head : parsed.value) out.push_back({doc.doc_id, stage, name, head, ""});
      continue;
    }
    for (const std::string& head : heads) {
      context.subject = head;
      auto parsed = parse_fact_list(ask(render_fact_prompt(doc, r, head, options.with_description,
                                                           options.style, Paradigm::kDRHF, prompts),
                                        context),
                                    r, head, passage, options.strict_entities);
      for (const ParsedFact& f : parsed.value) {
        out.push_back({doc.doc_id, stage, name, f.head, f.tail});
      }
    }
  }
  return out;
}

void write_stage_predictions(std::ostream& out, std::span<const StagePrediction> predictions) {
  for (const StagePrediction& p : predictions) {
    ordered_json line = {{"doc_id", p.doc_id}, {"stage", to_string(p.stage)}, {"relation", p.relation}};
    if (p.stage != Stage::kRelation) line["head"] = p.head;
    if (p.stage == Stage::kFact) line["tail"] = p.tail;
    out << line.dump() << '\n';
  }
}

std::vector<StagePrediction> read_stage_predictions(std::istream& in) {
  std::vector<StagePrediction> out;
  std::string line;
  for (size_t n = 1; std::getline(in, line); ++n) {
    if (text::trim(line).empty()) continue;
    const std::string where = "stage predictions line " + std::to_string(n);
    try {
      const auto j = nlohmann::json::parse(line);
      StagePrediction p;
      p.doc_id = j.at("doc_id").get<std::string>();
      const auto stage = parse_stage(j.at("stage").get<std::string>());
      if (!stage) throw Error(ErrorCode::kInput, where + ": unknown stage");
      p.stage = *stage;
      p.relation = j.at("relation").get<std::string>();
      if (p.stage != Stage::kRelation) p.head = j.at("head").get<std::string>();
      if (p.stage == Stage::kFact) p.tail = j.at("tail").get<std::string>();
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInput, where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace docrex
