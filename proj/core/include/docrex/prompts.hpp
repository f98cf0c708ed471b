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

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docrex/corpus.hpp"
#include "docrex/ontology.hpp"
#include "docrex/template.hpp"

namespace docrex {

// The three sub-tasks of the relation -> head -> facts decomposition. Each
// one can be routed to its own model or adapter.
enum class Stage { kRelation, kHead, kFact };

const char* to_string(Stage stage);  // "relation", "head", "fact"
std::optional<Stage> parse_stage(std::string_view name);

enum class Paradigm {
  kDF,    // document -> facts
  kDRSF,  // document -> relation set -> facts
  kDRF,   // document -> relation -> facts, one fact call per relation
  kDRHF,  // document -> relation -> heads -> facts
};

const char* to_string(Paradigm paradigm);     // "df", "drsf", "drf", "drhf"
const char* display_name(Paradigm paradigm);  // "D-F", "D-RS-F", "D-R-F", "D-R-H-F"
std::optional<Paradigm> parse_paradigm(std::string_view name);

// kChat: prompts written for untuned chat models, listing the candidate
// relations and spelling out the output format.
// kTuned: the short instruction-tuning prompts used by fine-tuned adapters,
// with no candidate list.
enum class PromptStyle { kChat, kTuned };

const char* to_string(PromptStyle style);
std::optional<PromptStyle> parse_prompt_style(std::string_view name);

enum class RelationListingMode { kWithCandidates, kOpen };

struct RenderedPrompt {
  Stage stage = Stage::kRelation;
  Paradigm paradigm = Paradigm::kDRHF;
  std::string template_name;
  std::string text;
  SlotMap slots;  // filled slot values, verbatim
};

// Named prompt templates. builtin() holds the templates shipped in
// core/data/templates; load_dir() reads same-named *.txt files from a
// directory, so prompts can be edited without rebuilding.
class PromptSet {
 public:
  static const PromptSet& builtin();
  static PromptSet load_dir(const std::filesystem::path& dir);

  const PromptTemplate& get(std::string_view name) const;

  static const std::vector<std::string>& template_names();

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

// The sentinel a model emits when a passage holds no relation.
inline constexpr std::string_view kNoRelation = "no relation";

// Quoted, comma-separated relation names in brackets. Quoting keeps names
// that contain commas ("dissolved, abolished or demolished") unambiguous.
std::string format_relation_list(std::span<const Relation* const> relations);
std::string format_relation_list(const RelationOntology& ontology);

// "[head, relation, tail]"
std::string format_fact(std::string_view head, std::string_view relation, std::string_view tail);

RenderedPrompt render_relation_listing_prompt(const Document& doc, const RelationOntology& ontology,
                                              RelationListingMode mode,
                                              Paradigm paradigm = Paradigm::kDRHF,
                                              const PromptSet& prompts = PromptSet::builtin());

RenderedPrompt render_head_prompt(const Document& doc, const Relation& relation,
                                  bool with_description, PromptStyle style = PromptStyle::kChat,
                                  const PromptSet& prompts = PromptSet::builtin());

// With a subject this is the per-head prompt of D-R-H-F; without one it is
// the per-relation fact prompt of D-R-F.
RenderedPrompt render_fact_prompt(const Document& doc, const Relation& relation,
                                  const std::optional<std::string>& subject, bool with_description,
                                  PromptStyle style = PromptStyle::kChat,
                                  Paradigm paradigm = Paradigm::kDRHF,
                                  const PromptSet& prompts = PromptSet::builtin());

// D-F: every relation of the ontology offered as a candidate.
RenderedPrompt render_direct_facts_prompt(const Document& doc, const RelationOntology& ontology,
                                          const PromptSet& prompts = PromptSet::builtin());

// D-RS-F second step: the predicted relations embedded in one prompt.
RenderedPrompt render_relation_set_facts_prompt(const Document& doc,
                                                std::span<const Relation* const> relations,
                                                const PromptSet& prompts = PromptSet::builtin());

// ---------------------------------------------------------------------------
// Response parsing. Parse failures are data: every non-blank line of the
// response is either accepted or listed in `rejected` with a reason.

enum class RejectReason {
  kUnknownRelation,
  kDuplicate,
  kNotInPassage,
  kMalformed,
  kRelationAnchorMissing,
  kAmbiguousAnchor,
  kSubjectMismatch,
  kEmptyField,
};

const char* to_string(RejectReason reason);

struct RejectedLine {
  std::string line;
  RejectReason reason;
};

template <typename T>
struct ParseOutcome {
  T value{};
  std::vector<RejectedLine> rejected;
  size_t accepted_lines = 0;  // includes a "no relation" sentinel line
  size_t blank_lines = 0;
  std::string raw;

  size_t total_lines() const { return accepted_lines + rejected.size() + blank_lines; }
};

struct ParsedFact {
  std::string head;
  const Relation* relation = nullptr;
  std::string tail;

  bool operator==(const ParsedFact&) const = default;
};

// Strips surrounding whitespace plus a leading bullet ("-", "*", "•") or
// enumeration ("3.", "3)").
std::string_view strip_list_marker(std::string_view line);

ParseOutcome<std::vector<const Relation*>> parse_relation_list(std::string_view raw,
                                                               const RelationOntology& ontology);

// With `strict`, entities that are not a substring of `passage` are rejected.
ParseOutcome<std::vector<std::string>> parse_entity_list(std::string_view raw,
                                                         std::string_view passage, bool strict);

// Fact lines for a known relation. The relation name, delimited by commas,
// splits head from tail, so entity names may themselves contain commas.
ParseOutcome<std::vector<ParsedFact>> parse_fact_list(std::string_view raw, const Relation& relation,
                                                      const std::optional<std::string>& fixed_subject,
                                                      std::string_view passage, bool strict);

// Fact lines whose relation is not known in advance: every ontology relation
// is tried as the anchor and only a unique match is accepted.
ParseOutcome<std::vector<ParsedFact>> parse_fact_list_any(std::string_view raw,
                                                          const RelationOntology& ontology,
                                                          std::string_view passage, bool strict);

}  // namespace docrex
