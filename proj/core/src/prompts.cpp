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

#include "docrex/prompts.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "docrex/error.hpp"
#include "docrex/resources.hpp"
#include "docrex/text.hpp"

namespace docrex {

const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::kRelation: return "relation";
    case Stage::kHead: return "head";
    case Stage::kFact: return "fact";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (Stage s : {Stage::kRelation, Stage::kHead, Stage::kFact}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

const char* to_string(Paradigm paradigm) {
  switch (paradigm) {
    case Paradigm::kDF: return "df";
    case Paradigm::kDRSF: return "drsf";
    case Paradigm::kDRF: return "drf";
    case Paradigm::kDRHF: return "drhf";
  }
  return "?";
}

const char* display_name(Paradigm paradigm) {
  switch (paradigm) {
    case Paradigm::kDF: return "D-F";
    case Paradigm::kDRSF: return "D-RS-F";
    case Paradigm::kDRF: return "D-R-F";
    case Paradigm::kDRHF: return "D-R-H-F";
  }
  return "?";
}

std::optional<Paradigm> parse_paradigm(std::string_view name) {
  const std::string lower = text::ascii_lower(name);
  for (Paradigm p : {Paradigm::kDF, Paradigm::kDRSF, Paradigm::kDRF, Paradigm::kDRHF}) {
    if (lower == to_string(p) || lower == text::ascii_lower(display_name(p))) return p;
  }
  if (lower == "rhf") return Paradigm::kDRHF;
  return std::nullopt;
}

const char* to_string(PromptStyle style) {
  return style == PromptStyle::kChat ? "chat" : "tuned";
}

std::optional<PromptStyle> parse_prompt_style(std::string_view name) {
  if (name == "chat") return PromptStyle::kChat;
  if (name == "tuned") return PromptStyle::kTuned;
  return std::nullopt;
}

const char* to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kUnknownRelation: return "unknown-relation";
    case RejectReason::kDuplicate: return "duplicate";
    case RejectReason::kNotInPassage: return "not-in-passage";
    case RejectReason::kMalformed: return "malformed";
    case RejectReason::kRelationAnchorMissing: return "relation-anchor-missing";
    case RejectReason::kAmbiguousAnchor: return "ambiguous-anchor";
    case RejectReason::kSubjectMismatch: return "subject-mismatch";
    case RejectReason::kEmptyField: return "empty-field";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Templates

const std::vector<std::string>& PromptSet::template_names() {
  static const std::vector<std::string> names = {
      "relation_list_chat", "relation_list_tuned", "head_chat",
      "head_tuned",         "fact_chat_relation",  "fact_chat_subject",
      "fact_tuned_relation", "fact_tuned_subject", "facts_direct_chat",
      "facts_relation_set_chat"};
  return names;
}

namespace {

// Template files end with a newline; prompts do not.
std::string_view drop_final_newline(std::string_view s) {
  if (!s.empty() && s.back() == '\n') s.remove_suffix(1);
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

const PromptSet& PromptSet::builtin() {
  static const PromptSet set = [] {
    PromptSet s;
    for (const std::string& name : template_names()) {
      s.templates_.emplace(
          name, PromptTemplate::parse(drop_final_newline(resources::get("templates/" + name)), name));
    }
    return s;
  }();
  return set;
}

PromptSet PromptSet::load_dir(const std::filesystem::path& dir) {
  PromptSet s;
  for (const std::string& name : template_names()) {
    const auto path = dir / (name + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open template " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    s.templates_.emplace(name, PromptTemplate::parse(drop_final_newline(buffer.str()), name));
  }
  return s;
}

const PromptTemplate& PromptSet::get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) {
    throw Error(ErrorCode::kConfig, "unknown prompt template '" + std::string(name) + "'");
  }
  return it->second;
}

std::string format_relation_list(std::span<const Relation* const> relations) {
  std::string out = "[";
  for (size_t i = 0; i < relations.size(); ++i) {
    if (i) out += ", ";
    out += '"';
    out += relations[i]->name;
    out += '"';
  }
  out += "]";
  return out;
}

std::string format_relation_list(const RelationOntology& ontology) {
  std::vector<const Relation*> all;
  for (const Relation& r : ontology.relations()) all.push_back(&r);
  return format_relation_list(all);
}

std::string format_fact(std::string_view head, std::string_view relation, std::string_view tail) {
  std::string out;
  out.reserve(head.size() + relation.size() + tail.size() + 6);
  out += '[';
  out += head;
  out += ", ";
  out += relation;
  out += ", ";
  out += tail;
  out += ']';
  return out;
}

namespace {

RenderedPrompt render(const PromptSet& prompts, const std::string& template_name, Stage stage,
                      Paradigm paradigm, SlotMap slots) {
  RenderedPrompt prompt;
  prompt.stage = stage;
  prompt.paradigm = paradigm;
  prompt.template_name = template_name;
  prompt.text = prompts.get(template_name).render(slots);
  prompt.slots = std::move(slots);
  return prompt;
}

}  // namespace

RenderedPrompt render_relation_listing_prompt(const Document& doc, const RelationOntology& ontology,
                                              RelationListingMode mode, Paradigm paradigm,
                                              const PromptSet& prompts) {
  SlotMap slots{{"sentences", doc.passage()}};
  if (mode == RelationListingMode::kWithCandidates) {
    slots.emplace("relation_list", format_relation_list(ontology));
    return render(prompts, "relation_list_chat", Stage::kRelation, paradigm, std::move(slots));
  }
  return render(prompts, "relation_list_tuned", Stage::kRelation, paradigm, std::move(slots));
}

RenderedPrompt render_head_prompt(const Document& doc, const Relation& relation,
                                  bool with_description, PromptStyle style,
                                  const PromptSet& prompts) {
  SlotMap slots{{"sentences", doc.passage()}, {"relation", relation.name}};
  if (with_description) slots.emplace("description", relation.description);
  return render(prompts, style == PromptStyle::kChat ? "head_chat" : "head_tuned", Stage::kHead,
                Paradigm::kDRHF, std::move(slots));
}

RenderedPrompt render_fact_prompt(const Document& doc, const Relation& relation,
                                  const std::optional<std::string>& subject, bool with_description,
                                  PromptStyle style, Paradigm paradigm, const PromptSet& prompts) {
  SlotMap slots{{"sentences", doc.passage()}, {"relation", relation.name}};
  if (with_description) slots.emplace("description", relation.description);
  std::string name = style == PromptStyle::kChat ? "fact_chat_" : "fact_tuned_";
  if (subject) {
    slots.emplace("subject", *subject);
    name += "subject";
  } else {
    name += "relation";
  }
  return render(prompts, name, Stage::kFact, paradigm, std::move(slots));
}

RenderedPrompt render_direct_facts_prompt(const Document& doc, const RelationOntology& ontology,
                                          const PromptSet& prompts) {
  SlotMap slots{{"sentences", doc.passage()}, {"relation_list", format_relation_list(ontology)}};
  return render(prompts, "facts_direct_chat", Stage::kFact, Paradigm::kDF, std::move(slots));
}

RenderedPrompt render_relation_set_facts_prompt(const Document& doc,
                                                std::span<const Relation* const> relations,
                                                const PromptSet& prompts) {
  SlotMap slots{{"sentences", doc.passage()}, {"relation_list", format_relation_list(relations)}};
  return render(prompts, "facts_relation_set_chat", Stage::kFact, Paradigm::kDRSF,
                std::move(slots));
}

// ---------------------------------------------------------------------------
// Parsing

std::string_view strip_list_marker(std::string_view line) {
  line = text::trim(line);
  static constexpr std::string_view kBullet = "\xE2\x80\xA2";  // U+2022
  if (line.starts_with(kBullet)) {
    return text::trim(line.substr(kBullet.size()));
  }
  if (line.size() >= 2 && (line[0] == '-' || line[0] == '*') && (line[1] == ' ' || line[1] == '\t')) {
    return text::trim(line.substr(2));
  }
  size_t i = 0;
  while (i < line.size() && line[i] >= '0' && line[i] <= '9') ++i;
  if (i > 0 && i + 1 < line.size() && (line[i] == '.' || line[i] == ')') &&
      (line[i + 1] == ' ' || line[i + 1] == '\t')) {
    return text::trim(line.substr(i + 2));
  }
  return line;
}

namespace {

bool is_sentinel(std::string_view line) { return text::iequals(line, kNoRelation); }

struct Split {
  std::string head;
  std::string tail;
};

// Every way of reading `inner` as "<head> , <relation> , <tail>" where the
// relation name matches ASCII case-insensitively.
std::vector<Split> anchored_splits(std::string_view inner, std::string_view lower_inner,
                                   std::string_view relation_name) {
  std::vector<Split> splits;
  const std::string needle = text::ascii_lower(relation_name);
  if (needle.empty()) return splits;
  for (size_t p = lower_inner.find(needle); p != std::string_view::npos;
       p = lower_inner.find(needle, p + 1)) {
    size_t left = p;
    while (left > 0 && (inner[left - 1] == ' ' || inner[left - 1] == '\t')) --left;
    if (left == 0 || inner[left - 1] != ',') continue;
    size_t right = p + needle.size();
    while (right < inner.size() && (inner[right] == ' ' || inner[right] == '\t')) ++right;
    if (right >= inner.size() || inner[right] != ',') continue;
    splits.push_back({std::string(text::trim(inner.substr(0, left - 1))),
                      std::string(text::trim(inner.substr(right + 1)))});
  }
  return splits;
}

// Returns the bracket contents of a fact line, or nullopt if the line is not
// of the form "[ ... ]".
std::optional<std::string_view> bracket_contents(std::string_view line) {
  if (line.size() < 2 || line.front() != '[' || line.back() != ']') return std::nullopt;
  return line.substr(1, line.size() - 2);
}

struct FactLineContext {
  std::string_view passage;
  bool strict;
  std::set<std::tuple<std::string, const Relation*, std::string>> seen;
};

void accept_fact(ParseOutcome<std::vector<ParsedFact>>& out, FactLineContext& ctx,
                 std::string_view line, Split split, const Relation* relation) {
  if (split.head.empty() || split.tail.empty()) {
    out.rejected.push_back({std::string(line), RejectReason::kEmptyField});
    return;
  }
  if (ctx.strict && (ctx.passage.find(split.head) == std::string_view::npos ||
                     ctx.passage.find(split.tail) == std::string_view::npos)) {
    out.rejected.push_back({std::string(line), RejectReason::kNotInPassage});
    return;
  }
  if (!ctx.seen.emplace(split.head, relation, split.tail).second) {
    out.rejected.push_back({std::string(line), RejectReason::kDuplicate});
    return;
  }
  ++out.accepted_lines;
  out.value.push_back({std::move(split.head), relation, std::move(split.tail)});
}

}  // namespace

ParseOutcome<std::vector<const Relation*>> parse_relation_list(std::string_view raw,
                                                               const RelationOntology& ontology) {
  ParseOutcome<std::vector<const Relation*>> out;
  out.raw = std::string(raw);
  for (std::string_view original : text::split_lines(raw)) {
    const std::string_view line = strip_list_marker(original);
    if (line.empty()) {
      ++out.blank_lines;
      continue;
    }
    if (is_sentinel(line)) {
      ++out.accepted_lines;
      continue;
    }
    const Relation* r = ontology.by_name_ci(line);
    if (r == nullptr) {
      out.rejected.push_back({std::string(original), RejectReason::kUnknownRelation});
    } else if (std::find(out.value.begin(), out.value.end(), r) != out.value.end()) {
      out.rejected.push_back({std::string(original), RejectReason::kDuplicate});
    } else {
      ++out.accepted_lines;
      out.value.push_back(r);
    }
  }
  return out;
}

ParseOutcome<std::vector<std::string>> parse_entity_list(std::string_view raw,
                                                         std::string_view passage, bool strict) {
  ParseOutcome<std::vector<std::string>> out;
  out.raw = std::string(raw);
  std::set<std::string, std::less<>> seen;
  for (std::string_view original : text::split_lines(raw)) {
    const std::string_view line = strip_list_marker(original);
    if (line.empty()) {
      ++out.blank_lines;
      continue;
    }
    if (is_sentinel(line)) {
      ++out.accepted_lines;
      continue;
    }
    if (strict && passage.find(line) == std::string_view::npos) {
      out.rejected.push_back({std::string(original), RejectReason::kNotInPassage});
    } else if (!seen.emplace(line).second) {
      out.rejected.push_back({std::string(original), RejectReason::kDuplicate});
    } else {
      ++out.accepted_lines;
      out.value.emplace_back(line);
    }
  }
  return out;
}

ParseOutcome<std::vector<ParsedFact>> parse_fact_list(std::string_view raw, const Relation& relation,
                                                      const std::optional<std::string>& fixed_subject,
                                                      std::string_view passage, bool strict) {
  ParseOutcome<std::vector<ParsedFact>> out;
  out.raw = std::string(raw);
  FactLineContext ctx{passage, strict, {}};
  const std::string subject = fixed_subject ? std::string(text::trim(*fixed_subject)) : "";
  for (std::string_view original : text::split_lines(raw)) {
    const std::string_view line = strip_list_marker(original);
    if (line.empty()) {
      ++out.blank_lines;
      continue;
    }
    if (is_sentinel(line)) {
      ++out.accepted_lines;
      continue;
    }
    const auto inner = bracket_contents(line);
    if (!inner) {
      out.rejected.push_back({std::string(original), RejectReason::kMalformed});
      continue;
    }
    std::vector<Split> splits = anchored_splits(*inner, text::ascii_lower(*inner), relation.name);
    if (splits.empty()) {
      out.rejected.push_back({std::string(original), RejectReason::kRelationAnchorMissing});
      continue;
    }
    if (fixed_subject) {
      auto it = std::find_if(splits.begin(), splits.end(),
                             [&](const Split& s) { return s.head == subject; });
      if (it == splits.end()) {
        out.rejected.push_back({std::string(original), RejectReason::kSubjectMismatch});
        continue;
      }
      accept_fact(out, ctx, original, std::move(*it), &relation);
      continue;
    }
    if (splits.size() > 1) {
      out.rejected.push_back({std::string(original), RejectReason::kAmbiguousAnchor});
      continue;
    }
    accept_fact(out, ctx, original, std::move(splits.front()), &relation);
  }
  return out;
}

ParseOutcome<std::vector<ParsedFact>> parse_fact_list_any(std::string_view raw,
                                                          const RelationOntology& ontology,
                                                          std::string_view passage, bool strict) {
  ParseOutcome<std::vector<ParsedFact>> out;
  out.raw = std::string(raw);
  FactLineContext ctx{passage, strict, {}};
  for (std::string_view original : text::split_lines(raw)) {
    const std::string_view line = strip_list_marker(original);
    if (line.empty()) {
      ++out.blank_lines;
      continue;
    }
    if (is_sentinel(line)) {
      ++out.accepted_lines;
      continue;
    }
    const auto inner = bracket_contents(line);
    if (!inner) {
      out.rejected.push_back({std::string(original), RejectReason::kMalformed});
      continue;
    }
    const std::string lower = text::ascii_lower(*inner);
    const Relation* match = nullptr;
    std::vector<Split> match_splits;
    size_t n_matches = 0;
    for (const Relation& r : ontology.relations()) {
      std::vector<Split> splits = anchored_splits(*inner, lower, r.name);
      if (splits.empty()) continue;
      n_matches += splits.size();
      match = &r;
      match_splits = std::move(splits);
    }
    if (n_matches == 0) {
      out.rejected.push_back({std::string(original), RejectReason::kRelationAnchorMissing});
    } else if (n_matches > 1) {
      out.rejected.push_back({std::string(original), RejectReason::kAmbiguousAnchor});
    } else {
      accept_fact(out, ctx, original, std::move(match_splits.front()), match);
    }
  }
  return out;
}

}  // namespace docrex
