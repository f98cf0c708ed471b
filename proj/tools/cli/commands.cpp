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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "docrex/backend.hpp"
#include "docrex/cache.hpp"
#include "docrex/corpus.hpp"
#include "docrex/error.hpp"
#include "docrex/eval.hpp"
#include "docrex/http_backend.hpp"
#include "docrex/ontology.hpp"
#include "docrex/pipeline.hpp"
#include "docrex/prompts.hpp"
#include "docrex/tuningdata.hpp"
#include "json.hpp"

namespace docrex::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSnapshotName = "config.toml";
constexpr double kDefaultTolerance = 0.01;

// ---------------------------------------------------------------------------
// Option groups

struct CommonOptions {
  std::string out_dir;
  uint64_t seed = 0;
};

struct CorpusOptions {
  std::string corpus;
  std::string ontology;
  std::string split;
  bool lenient = false;
  bool fix_inverses = false;
  size_t limit = 0;
};

struct BackendOptions {
  bool oracle = false;
  bool replay = false;
  std::string cache_dir;
  std::string endpoint;
  std::string path = "/v1/chat/completions";
  std::string model;
  std::map<Stage, std::string> stage_endpoint;
  std::map<Stage, std::string> stage_model;
  std::string api_key_env = "DOCREX_API_KEY";
  bool no_api_key = false;
  std::string system_prompt;
  double timeout_s = 120.0;
  int max_in_flight = 4;
  int requests_per_minute = 0;
  int max_attempts = 4;
};

struct ExtractOptions {
  bool no_description = false;
  bool strict_entities = false;
  bool gold_relation_prior = false;
  std::string style = "chat";
  int call_budget = 512;
  double temperature = 0.0;
  int max_tokens = 2048;
  std::string prompts_dir;
  int parallelism = 1;
  bool no_trace_latency = false;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->configurable();
  app->fallthrough();
  app->add_option("-o,--out-dir", o.out_dir, "Output directory")->required();
  app->add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
}

void add_corpus(CLI::App* app, CorpusOptions& o, bool required = true) {
  auto* corpus = app->add_option("--corpus", o.corpus, "Corpus file (DocRED JSON format)");
  if (required) corpus->required();
  app->add_option("--ontology", o.ontology, "Relation ontology YAML (default: built-in Re-DocRED)");
  app->add_option("--split", o.split, "Split tag recorded in outputs");
  app->add_flag("--lenient", o.lenient, "Drop labels with unknown relations or h == t instead of failing");
  app->add_flag("--fix-inverses", o.fix_inverses, "Add missing reciprocal facts for declared inverse pairs");
  app->add_option("--limit", o.limit, "Use only the first N documents (0 = all)");
}

void add_backend(CLI::App* app, BackendOptions& o) {
  app->add_flag("--oracle", o.oracle, "Answer from gold annotations");
  app->add_flag("--replay", o.replay, "Answer only from --cache-dir; misses are errors");
  app->add_option("--cache-dir", o.cache_dir, "Response cache directory (recorded on every call)");
  app->add_option("--endpoint", o.endpoint, "Chat-completions base URL, e.g. http://127.0.0.1:8000");
  app->add_option("--path", o.path, "Request path")->capture_default_str();
  app->add_option("--model", o.model, "Model name");
  for (Stage s : {Stage::kRelation, Stage::kHead, Stage::kFact}) {
    const std::string name = to_string(s);
    app->add_option("--" + name + "-endpoint", o.stage_endpoint[s], "Endpoint for the " + name + " stage");
    app->add_option("--" + name + "-model", o.stage_model[s], "Model for the " + name + " stage");
  }
  app->add_option("--api-key-env", o.api_key_env, "Environment variable holding the API key")
      ->capture_default_str();
  app->add_flag("--no-api-key", o.no_api_key, "Send requests without an API key");
  app->add_option("--system-prompt", o.system_prompt, "System message sent with every request");
  app->add_option("--timeout", o.timeout_s, "Per-request timeout in seconds")->capture_default_str();
  app->add_option("--max-in-flight", o.max_in_flight, "Concurrent requests per endpoint")
      ->capture_default_str();
  app->add_option("--rpm", o.requests_per_minute, "Requests per minute per endpoint (0 = unlimited)");
  app->add_option("--max-attempts", o.max_attempts, "Attempts for transient failures")
      ->capture_default_str();
}

void add_extract(CLI::App* app, ExtractOptions& o) {
  app->add_flag("--no-description", o.no_description, "Leave relation descriptions out of prompts");
  app->add_flag("--strict-entities", o.strict_entities, "Drop entities that do not occur in the passage");
  app->add_flag("--gold-relation-prior", o.gold_relation_prior,
                "Use each document's gold relations instead of the relation stage");
  app->add_option("--style", o.style, "Prompt style: chat or tuned")->capture_default_str();
  app->add_option("--call-budget", o.call_budget, "Maximum backend calls per document")
      ->capture_default_str();
  app->add_option("--temperature", o.temperature, "Decoding temperature")->capture_default_str();
  app->add_option("--max-tokens", o.max_tokens, "Decoding token limit")->capture_default_str();
  app->add_option("--prompts-dir", o.prompts_dir, "Directory of replacement prompt templates");
  app->add_option("--parallelism", o.parallelism, "Documents processed concurrently")
      ->capture_default_str();
  app->add_flag("--no-trace-latency", o.no_trace_latency, "Omit latencies from traces");
}

// ---------------------------------------------------------------------------
// Loading and output helpers

struct LoadedCorpus {
  std::shared_ptr<const RelationOntology> ontology;
  std::vector<Document> docs;
  std::vector<SkippedLabel> skipped;
  size_t duplicates_removed = 0;
  size_t missing_inverses = 0;
  size_t inverses_added = 0;
};

std::shared_ptr<const RelationOntology> load_ontology_option(const std::string& path) {
  if (path.empty()) return std::shared_ptr<const RelationOntology>(&redocred_ontology(), [](auto*) {});
  return std::make_shared<const RelationOntology>(load_ontology(path));
}

LoadedCorpus load(const CorpusOptions& o) {
  LoadedCorpus lc;
  lc.ontology = load_ontology_option(o.ontology);
  if (!fs::exists(o.corpus)) throw Error(ErrorCode::kInput, "corpus file not found: " + o.corpus);
  ParsedCorpus parsed =
      load_corpus(o.corpus, *lc.ontology, o.lenient ? LabelPolicy::kLenient : LabelPolicy::kStrict);
  lc.docs = std::move(parsed.documents);
  lc.skipped = std::move(parsed.skipped_labels);
  if (o.limit > 0 && lc.docs.size() > o.limit) lc.docs.resize(o.limit);
  for (Document& doc : lc.docs) {
    lc.duplicates_removed += dedup_facts(doc);
    const InverseReport report = check_inverse_consistency(doc, *lc.ontology, o.fix_inverses);
    lc.missing_inverses += report.missing.size();
    lc.inverses_added += report.added;
  }
  return lc;
}

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "cannot create output directory '" + dir + "': " + ec.message());
  }
  return fs::path(dir);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << content;
  f.close();
  if (!f) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

template <typename Writer>
void write_stream(const fs::path& path, Writer writer) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  writer(f);
  f.close();
  if (!f) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kInput, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Effective options of the subcommand as a [section] readable by --config.
// Unset options are left out.
void write_snapshot(const CLI::App* app, const fs::path& out_dir) {
  std::istringstream lines(app->config_to_str(true, false));
  std::string snapshot = "[" + app->get_name() + "]\n";
  for (std::string line; std::getline(lines, line);) {
    if (line.ends_with("=\"\"") || line.ends_with("=")) continue;
    snapshot += line + '\n';
  }
  write_file(out_dir / kSnapshotName, snapshot);
}

// ---------------------------------------------------------------------------
// Backends

struct Routing {
  StageRouting routing;
  std::vector<std::shared_ptr<RecordingBackend>> recorders;
};

Routing build_routing(const BackendOptions& o, std::span<const Document> docs,
                      const RelationOntology& ontology) {
  if (o.oracle && o.replay) throw Error(ErrorCode::kConfig, "--oracle and --replay are exclusive");
  if (o.max_attempts < 1) throw Error(ErrorCode::kConfig, "--max-attempts must be at least 1");

  Routing r;
  r.routing.retry.max_attempts = o.max_attempts;

  std::shared_ptr<CacheStore> store;
  if (!o.cache_dir.empty()) store = std::make_shared<CacheStore>(o.cache_dir);

  if (o.replay) {
    if (!store) throw Error(ErrorCode::kConfig, "--replay needs --cache-dir");
    r.routing.bind_all(std::make_shared<ReplayBackend>(store));
    return r;
  }

  auto record = [&](std::shared_ptr<ChatBackend> inner) -> std::shared_ptr<ChatBackend> {
    if (!store) return inner;
    auto rec = std::make_shared<RecordingBackend>(store, std::move(inner));
    r.recorders.push_back(rec);
    return rec;
  };

  if (o.oracle) {
    r.routing.bind_all(record(std::make_shared<OracleBackend>(docs, ontology)));
    return r;
  }

  // Remote: check every stage's settings before anything is contacted.
  std::map<Stage, std::pair<std::string, std::string>> targets;
  for (Stage s : {Stage::kRelation, Stage::kHead, Stage::kFact}) {
    const std::string& ep = o.stage_endpoint.at(s).empty() ? o.endpoint : o.stage_endpoint.at(s);
    const std::string& model = o.stage_model.at(s).empty() ? o.model : o.stage_model.at(s);
    if (ep.empty()) {
      throw Error(ErrorCode::kConfig, std::string("no backend for the ") + to_string(s) +
                                          " stage: give --endpoint, --oracle or --replay");
    }
    if (model.empty()) {
      throw Error(ErrorCode::kConfig, std::string("no model for the ") + to_string(s) + " stage");
    }
    targets[s] = {ep, model};
  }
  const std::string api_key = o.no_api_key ? std::string() : resolve_api_key(o.api_key_env);

  std::map<std::pair<std::string, std::string>, std::shared_ptr<ChatBackend>> shared;
  for (const auto& [stage, target] : targets) {
    auto& backend = shared[target];
    if (!backend) {
      HttpBackendConfig cfg;
      cfg.base_url = target.first;
      cfg.path = o.path;
      cfg.model = target.second;
      cfg.api_key = api_key;
      cfg.system_prompt = o.system_prompt;
      cfg.timeout = std::chrono::milliseconds(static_cast<long long>(o.timeout_s * 1000.0));
      cfg.max_in_flight = o.max_in_flight;
      cfg.requests_per_minute = o.requests_per_minute;
      backend = record(std::make_shared<HttpChatBackend>(cfg));
    }
    r.routing.bind(stage, backend);
  }
  return r;
}

void report_cache_warnings(const Routing& r, std::ostream& err) {
  for (const auto& rec : r.recorders) {
    for (const std::string& w : rec->warnings()) err << "warning: " << w << '\n';
  }
}

struct PipelineSetup {
  PipelineOptions options;
  std::unique_ptr<PromptSet> prompts;
};

PipelineSetup build_pipeline_options(const ExtractOptions& o) {
  PipelineSetup p;
  const auto style = parse_prompt_style(o.style);
  if (!style) throw Error(ErrorCode::kConfig, "unknown prompt style '" + o.style + "'");
  if (o.parallelism < 1) throw Error(ErrorCode::kConfig, "--parallelism must be at least 1");
  if (o.call_budget < 1) throw Error(ErrorCode::kConfig, "--call-budget must be at least 1");
  p.options.with_description = !o.no_description;
  p.options.strict_entities = o.strict_entities;
  p.options.gold_relation_prior = o.gold_relation_prior;
  p.options.style = *style;
  p.options.call_budget = o.call_budget;
  p.options.decode.temperature = o.temperature;
  p.options.decode.max_tokens = o.max_tokens;
  if (!o.prompts_dir.empty()) {
    p.prompts = std::make_unique<PromptSet>(PromptSet::load_dir(o.prompts_dir));
    p.options.prompts = p.prompts.get();
  }
  return p;
}

Paradigm paradigm_option(const std::string& name) {
  const auto p = parse_paradigm(name);
  if (!p) throw Error(ErrorCode::kConfig, "unknown paradigm '" + name + "' (df, drsf, drf, drhf)");
  return *p;
}

std::vector<PredictionRecord> to_records(std::span<const DocumentRun> runs) {
  std::vector<PredictionRecord> out;
  for (const DocumentRun& run : runs) {
    for (const PredictedFact& f : run.facts) {
      out.push_back({f.doc_id, f.head, f.relation ? f.relation->name : std::string(), f.tail,
                     to_string(f.paradigm)});
    }
  }
  return out;
}

void print_failures(const RunSummary& summary, std::ostream& err) {
  for (const auto& [doc, error] : summary.failures) {
    err << "error: " << display_name(summary.paradigm) << " failed on '" << doc << "': " << error << '\n';
  }
}

bool within(double actual, double expected, double tolerance) {
  return std::fabs(actual - expected) <= tolerance + 1e-9;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_ingest(const CLI::App* app, const CommonOptions& common, const CorpusOptions& co,
               std::ostream& out, std::ostream& err) {
  const LoadedCorpus lc = load(co);
  const fs::path dir = prepare_out_dir(common.out_dir);
  write_file(dir / "corpus.json", serialize_corpus(lc.docs));

  const CorpusStats stats = corpus_stats(lc.docs);
  nlohmann::ordered_json j;
  j["split"] = co.split;
  j["documents"] = stats.n_documents;
  j["gold_facts"] = stats.n_gold_facts;
  j["distinct_relations"] = stats.n_distinct_relations;
  j["max_facts_per_document"] = stats.max_facts_per_doc;
  j["max_relations_per_document"] = stats.max_relations_per_doc;
  j["duplicates_removed"] = lc.duplicates_removed;
  j["missing_inverses"] = lc.missing_inverses;
  j["inverses_added"] = lc.inverses_added;
  j["skipped_labels"] = nlohmann::ordered_json::array();
  for (const SkippedLabel& s : lc.skipped) {
    j["skipped_labels"].push_back(
        {{"doc_id", s.doc_id}, {"label_index", s.label_index}, {"relation", s.relation_id}, {"reason", s.reason}});
  }
  write_file(dir / "stats.json", j.dump(2) + "\n");
  write_snapshot(app, dir);

  out << "documents: " << stats.n_documents << '\n'
      << "gold facts: " << stats.n_gold_facts << '\n'
      << "distinct relations: " << stats.n_distinct_relations << '\n'
      << "duplicates removed: " << lc.duplicates_removed << '\n'
      << "missing inverse facts: " << lc.missing_inverses << '\n';
  if (co.fix_inverses) out << "inverse facts added: " << lc.inverses_added << '\n';
  if (!lc.skipped.empty()) err << "warning: skipped " << lc.skipped.size() << " labels\n";
  return kExitOk;
}

int cmd_extract(const CLI::App* app, const CommonOptions& common, const CorpusOptions& co,
                const BackendOptions& bo, const ExtractOptions& eo, const std::string& paradigm_name,
                bool stagewise, std::ostream& out, std::ostream& err) {
  const Paradigm paradigm = paradigm_option(paradigm_name);
  const LoadedCorpus lc = load(co);
  const PipelineSetup setup = build_pipeline_options(eo);
  Routing routing = build_routing(bo, lc.docs, *lc.ontology);
  const fs::path dir = prepare_out_dir(common.out_dir);
  write_snapshot(app, dir);

  if (stagewise) {
    for (Stage stage : {Stage::kRelation, Stage::kHead, Stage::kFact}) {
      std::vector<StagePrediction> preds;
      for (const Document& doc : lc.docs) {
        auto p = run_stage_probe(doc, stage, routing.routing, *lc.ontology, setup.options);
        preds.insert(preds.end(), p.begin(), p.end());
      }
      write_stream(dir / (std::string("stage_") + to_string(stage) + ".jsonl"),
                   [&](std::ostream& f) { write_stage_predictions(f, preds); });
      out << to_string(stage) << ": " << preds.size() << " predictions\n";
    }
    report_cache_warnings(routing, err);
    return kExitOk;
  }

  const CorpusRun run =
      run_corpus(lc.docs, paradigm, routing.routing, *lc.ontology, setup.options, eo.parallelism);
  write_stream(dir / "predictions.jsonl", [&](std::ostream& f) { write_predictions(f, run.runs); });
  write_stream(dir / "traces.jsonl",
               [&](std::ostream& f) { write_traces(f, run.runs, !eo.no_trace_latency); });
  write_file(dir / "summary.json", summary_json(run.summary) + "\n");
  report_cache_warnings(routing, err);

  out << display_name(paradigm) << ": " << run.summary.n_documents << " documents, "
      << run.summary.n_predictions << " predictions, " << run.summary.total_calls() << " calls, "
      << run.summary.n_failed << " failed, " << run.summary.n_truncated << " truncated\n";
  if (run.summary.n_failed > 0) {
    print_failures(run.summary, err);
    return kExitBackend;
  }
  return kExitOk;
}

struct EvalOptions {
  std::string predictions;
  std::string stage_dir;
  std::string audit;
  std::string label;
  std::optional<double> expect_f1;
  double tolerance = kDefaultTolerance;
};

int check_expectation(const EvalRow& row, const EvalOptions& eo, std::ostream& err) {
  if (!eo.expect_f1) return kExitOk;
  const double f1 = row.scores().f1;
  if (within(f1, *eo.expect_f1, eo.tolerance)) return kExitOk;
  err << "mismatch: " << row.label << " F1 " << f1 << ", expected " << *eo.expect_f1 << " +/- "
      << eo.tolerance << '\n';
  return kExitMismatch;
}

int cmd_eval_audit(const CLI::App* app, const CommonOptions& common, const EvalOptions& eo,
                   std::ostream& out, std::ostream& err) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(eo.audit));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInput, eo.audit + ": " + e.what());
  }
  if (!j.is_array()) throw Error(ErrorCode::kInput, eo.audit + ": expected a JSON array of rows");

  std::vector<EvalRow> rows;
  int status = kExitOk;
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string where = eo.audit + "[" + std::to_string(i) + "]";
    EvalRow row;
    try {
      row.label = j[i].value("label", "row " + std::to_string(i));
      row.tp = j[i].at("tp").get<size_t>();
      row.fp = j[i].at("fp").get<size_t>();
      row.total_gold = j[i].at("total_gold").get<size_t>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInput, where + ": " + e.what());
    }
    rows.push_back(row);
    if (!j[i].contains("expect")) continue;
    const Scores s = row.scores();
    const auto& ex = j[i]["expect"];
    const std::pair<const char*, double> checks[] = {
        {"recall", s.recall}, {"precision", s.precision}, {"f1", s.f1}};
    for (const auto& [key, actual] : checks) {
      if (!ex.contains(key)) continue;
      const double expected = ex[key].get<double>();
      if (!within(actual, expected, eo.tolerance)) {
        err << "mismatch: " << row.label << ' ' << key << ' ' << actual << ", expected " << expected
            << '\n';
        status = kExitMismatch;
      }
    }
  }

  const fs::path dir = prepare_out_dir(common.out_dir);
  EvalReport report;
  report.per_relation = {};
  report.per_stage = rows;
  report.metadata["mode"] = "audit";
  if (!rows.empty()) report.overall = rows.front();
  const std::string table = render_table(rows, eo.label.empty() ? "Paradigm" : eo.label);
  write_file(dir / "report.json", report_json(report) + "\n");
  write_file(dir / "table.txt", table);
  write_snapshot(app, dir);
  out << table;
  return status;
}

int cmd_eval(const CLI::App* app, const CommonOptions& common, const CorpusOptions& co,
             const EvalOptions& eo, std::ostream& out, std::ostream& err) {
  const int modes = !eo.predictions.empty() + !eo.stage_dir.empty() + !eo.audit.empty();
  if (modes != 1) {
    throw Error(ErrorCode::kConfig, "give exactly one of --predictions, --stage-dir, --audit");
  }
  if (!eo.audit.empty()) return cmd_eval_audit(app, common, eo, out, err);
  if (co.corpus.empty()) throw Error(ErrorCode::kConfig, "--corpus is required");

  const LoadedCorpus lc = load(co);
  EvalReport report;
  std::string table;

  if (!eo.predictions.empty()) {
    std::ifstream f(eo.predictions, std::ios::binary);
    if (!f) throw Error(ErrorCode::kInput, "cannot read " + eo.predictions);
    const std::vector<PredictionRecord> preds = read_predictions(f);
    report = evaluate_run(preds, lc.docs, *lc.ontology);
    std::string label = eo.label;
    if (label.empty() && !preds.empty()) {
      const auto p = parse_paradigm(preds.front().paradigm);
      label = p ? display_name(*p) : preds.front().paradigm;
    }
    report.overall.label = label.empty() ? "run" : label;
    report.metadata["predictions"] = eo.predictions;
    const EvalRow rows[] = {report.overall};
    table = render_table(rows, "Paradigm");
  } else {
    std::vector<EvalRow> rows;
    for (Stage stage : {Stage::kRelation, Stage::kHead, Stage::kFact}) {
      const fs::path path = fs::path(eo.stage_dir) / (std::string("stage_") + to_string(stage) + ".jsonl");
      if (!fs::exists(path)) continue;
      std::ifstream f(path, std::ios::binary);
      const std::vector<StagePrediction> preds = read_stage_predictions(f);
      EvalRow row = evaluate_stage(stage, preds, lc.docs, *lc.ontology).overall;
      row.label = eo.label.empty() ? to_string(stage) : eo.label + " " + to_string(stage);
      rows.push_back(row);
    }
    if (rows.empty()) {
      throw Error(ErrorCode::kInput, "no stage_<stage>.jsonl files in " + eo.stage_dir);
    }
    report.overall = rows.back();
    report.per_stage = rows;
    report.metadata["stage_dir"] = eo.stage_dir;
    table = render_table(rows, "Module");
  }
  report.metadata["corpus"] = co.corpus;
  if (!co.split.empty()) report.metadata["split"] = co.split;

  const fs::path dir = prepare_out_dir(common.out_dir);
  write_file(dir / "report.json", report_json(report) + "\n");
  write_file(dir / "table.txt", table);
  write_snapshot(app, dir);
  out << table;
  return check_expectation(report.overall, eo, err);
}

int cmd_gen_tuning(const CLI::App* app, const CommonOptions& common, const CorpusOptions& co,
                   bool no_description, size_t negatives, std::ostream& out) {
  const LoadedCorpus lc = load(co);
  TuningOptions opts;
  opts.with_description = !no_description;
  opts.negatives_per_document = negatives;
  opts.seed = common.seed;
  const std::vector<TuningSample> samples = generate_samples(lc.docs, *lc.ontology, opts);

  const fs::path dir = prepare_out_dir(common.out_dir);
  TuningManifest manifest;
  write_stream(dir / "samples.jsonl", [&](std::ostream& f) { manifest = write_samples(samples, f); });
  write_file(dir / "manifest.json", manifest_json(manifest) + "\n");
  write_snapshot(app, dir);

  char line[160];
  for (Stage s : {Stage::kRelation, Stage::kHead, Stage::kFact}) {
    const size_t n = s == Stage::kRelation ? manifest.relation : s == Stage::kHead ? manifest.head : manifest.fact;
    std::snprintf(line, sizeof(line), "%-8s %8zu  %6.2f%%\n", to_string(s), n, manifest.share(s));
    out << line;
  }
  out << "total    " << manifest.total() << '\n';
  return kExitOk;
}

int cmd_compare(const CLI::App* app, const CommonOptions& common, const CorpusOptions& co,
                const BackendOptions& bo, const ExtractOptions& eo,
                const std::vector<std::string>& paradigm_names, std::ostream& out, std::ostream& err) {
  std::vector<Paradigm> paradigms;
  for (const std::string& name : paradigm_names) paradigms.push_back(paradigm_option(name));
  const LoadedCorpus lc = load(co);
  const PipelineSetup setup = build_pipeline_options(eo);
  Routing routing = build_routing(bo, lc.docs, *lc.ontology);
  const fs::path dir = prepare_out_dir(common.out_dir);
  write_snapshot(app, dir);

  std::vector<EvalRow> rows;
  TableColumn calls{"Calls", {}};
  TableColumn failed{"Failed", {}};
  nlohmann::ordered_json comparison = nlohmann::ordered_json::array();
  bool any_failed = false;
  for (Paradigm p : paradigms) {
    const CorpusRun run = run_corpus(lc.docs, p, routing.routing, *lc.ontology, setup.options, eo.parallelism);
    const std::string tag = to_string(p);
    write_stream(dir / ("predictions_" + tag + ".jsonl"), [&](std::ostream& f) { write_predictions(f, run.runs); });
    write_file(dir / ("summary_" + tag + ".json"), summary_json(run.summary) + "\n");

    const std::vector<PredictionRecord> records = to_records(run.runs);
    EvalRow row = evaluate_run(records, lc.docs, *lc.ontology).overall;
    row.label = display_name(p);
    rows.push_back(row);
    calls.values.push_back(std::to_string(run.summary.total_calls()));
    failed.values.push_back(std::to_string(run.summary.n_failed));
    const Scores s = row.scores();
    comparison.push_back({{"paradigm", tag},
                          {"tp", row.tp},
                          {"fp", row.fp},
                          {"total_gold", row.total_gold},
                          {"recall", s.recall},
                          {"precision", s.precision},
                          {"f1", s.f1},
                          {"calls", run.summary.total_calls()},
                          {"failed", run.summary.n_failed}});
    if (run.summary.n_failed > 0) {
      any_failed = true;
      print_failures(run.summary, err);
    }
  }
  const TableColumn extra[] = {calls, failed};
  const std::string table = render_table(rows, "Paradigm", extra);
  write_file(dir / "comparison.json", comparison.dump(2) + "\n");
  write_file(dir / "table.txt", table);
  report_cache_warnings(routing, err);
  out << table;
  return any_failed ? kExitBackend : kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kBackendUnavailable:
    case ErrorCode::kProvider:
    case ErrorCode::kTimeout:
      return kExitBackend;
    default:
      return kExitInput;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Document-level relation extraction with chat-model backends", "docrex"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML file; command-line flags take precedence");
  app.set_version_flag("--version", "docrex 0.1.0");

  CommonOptions common;
  CorpusOptions corpus;
  BackendOptions backend;
  ExtractOptions extract;
  EvalOptions eval;
  std::string paradigm = "drhf";
  bool stagewise = false;
  bool no_description = false;
  size_t negatives = 0;
  std::vector<std::string> paradigms = {"df", "drsf", "drf", "drhf"};

  auto* ingest = app.add_subcommand("ingest", "Parse, deduplicate and check a corpus");
  add_common(ingest, common);
  add_corpus(ingest, corpus);

  auto* ext = app.add_subcommand("extract", "Run an extraction paradigm over a corpus");
  add_common(ext, common);
  add_corpus(ext, corpus);
  add_backend(ext, backend);
  add_extract(ext, extract);
  ext->add_option("--paradigm", paradigm, "df, drsf, drf or drhf")->capture_default_str();
  ext->add_flag("--stagewise", stagewise, "Probe each stage with gold upstream inputs instead");

  auto* ev = app.add_subcommand("eval", "Score predictions against a corpus");
  add_common(ev, common);
  add_corpus(ev, corpus, false);
  ev->add_option("--predictions", eval.predictions, "Predictions file from extract");
  ev->add_option("--stage-dir", eval.stage_dir, "Directory with stage_<stage>.jsonl from extract --stagewise");
  ev->add_option("--audit", eval.audit, "JSON rows of {label, tp, fp, total_gold[, expect]}");
  ev->add_option("--label", eval.label, "Row label");
  ev->add_option("--expect-f1", eval.expect_f1, "Fail with exit code 1 unless F1 is within --tolerance");
  ev->add_option("--tolerance", eval.tolerance, "Tolerance for expectations")->capture_default_str();

  auto* gen = app.add_subcommand("gen-tuning", "Generate three-stage instruction-tuning samples");
  add_common(gen, common);
  add_corpus(gen, corpus);
  gen->add_flag("--no-description", no_description, "Leave relation descriptions out of instructions");
  gen->add_option("--negatives", negatives, "Absent-relation head samples per document (experimental)");

  auto* cmp = app.add_subcommand("compare-paradigms", "Run and score several paradigms");
  add_common(cmp, common);
  add_corpus(cmp, corpus);
  add_backend(cmp, backend);
  add_extract(cmp, extract);
  cmp->add_option("--paradigms", paradigms, "Paradigms to run")->delimiter(',')->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(ingest, common, corpus, out, err);
    if (ext->parsed()) {
      return cmd_extract(ext, common, corpus, backend, extract, paradigm, stagewise, out, err);
    }
    if (ev->parsed()) return cmd_eval(ev, common, corpus, eval, out, err);
    if (gen->parsed()) return cmd_gen_tuning(gen, common, corpus, no_description, negatives, out);
    if (cmp->parsed()) return cmd_compare(cmp, common, corpus, backend, extract, paradigms, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace docrex::cli
