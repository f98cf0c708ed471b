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

#include "oracles.hpp"

#include <functional>
#include <set>
#include <tuple>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

namespace docrex::testing {

std::string reference_normalize(std::string_view s) {
  size_t b = 0, e = s.size();
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (b < e && space(s[b])) ++b;
  while (e > b && space(s[e - 1])) --e;
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  const icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data() + b, static_cast<int32_t>(e - b)));
  icu::UnicodeString out = nfc->normalize(u, status);
  std::string result;
  out.toUTF8String(result);
  return result;
}

namespace {

bool has_alias(const Entity& entity, const std::string& text) {
  for (const Mention& m : entity.mentions) {
    if (reference_normalize(m.text) == text) return true;
  }
  return false;
}

bool fits(const PredictedFact& p, const GoldFact& g, const Document& doc) {
  return p.relation != nullptr && p.relation->id == g.relation_id &&
         has_alias(doc.entities[g.head], reference_normalize(p.head)) &&
         has_alias(doc.entities[g.tail], reference_normalize(p.tail));
}

}  // namespace

MatchTotals brute_force_match(std::span<const PredictedFact> predictions, const Document& doc) {
  MatchTotals totals;
  std::vector<bool> used(doc.gold_facts.size(), false);
  for (const PredictedFact& p : predictions) {
    bool any = false;
    bool credited = false;
    for (size_t g = 0; g < doc.gold_facts.size() && !credited; ++g) {
      if (!fits(p, doc.gold_facts[g], doc)) continue;
      any = true;
      if (!used[g]) {
        used[g] = true;
        credited = true;
      }
    }
    if (credited) {
      ++totals.tp;
    } else if (any) {
      ++totals.duplicate_hits;
    } else {
      ++totals.fp;
    }
  }
  return totals;
}

size_t optimal_tp(std::span<const PredictedFact> predictions, const Document& doc) {
  const size_t n_gold = doc.gold_facts.size();
  std::vector<std::vector<size_t>> adj(predictions.size());
  for (size_t p = 0; p < predictions.size(); ++p) {
    for (size_t g = 0; g < n_gold; ++g) {
      if (fits(predictions[p], doc.gold_facts[g], doc)) adj[p].push_back(g);
    }
  }
  std::vector<long> owner(n_gold, -1);
  size_t matched = 0;
  for (size_t p = 0; p < predictions.size(); ++p) {
    std::vector<bool> seen(n_gold, false);
    std::function<bool(size_t)> augment = [&](size_t u) {
      for (size_t g : adj[u]) {
        if (seen[g]) continue;
        seen[g] = true;
        if (owner[g] < 0 || augment(static_cast<size_t>(owner[g]))) {
          owner[g] = static_cast<long>(u);
          return true;
        }
      }
      return false;
    };
    if (augment(p)) ++matched;
  }
  return matched;
}

size_t expected_oracle_calls(const Document& doc, Paradigm paradigm, bool gold_relation_prior) {
  std::set<std::string> relations;
  std::set<std::pair<std::string, std::string>> heads;
  for (const GoldFact& f : doc.gold_facts) {
    relations.insert(f.relation_id);
    heads.emplace(f.relation_id, doc.entities[f.head].mentions.front().text);
  }
  const size_t listing = gold_relation_prior ? 0 : 1;
  switch (paradigm) {
    case Paradigm::kDF:
      return 1;
    case Paradigm::kDRSF:
      return listing + (relations.empty() ? 0 : 1);
    case Paradigm::kDRF:
      return listing + relations.size();
    case Paradigm::kDRHF:
      return listing + relations.size() + heads.size();
  }
  return 0;
}

namespace {

std::vector<std::tuple<long, long, std::string>> distinct_labels(const nlohmann::json& doc) {
  std::vector<std::tuple<long, long, std::string>> out;
  std::set<std::tuple<long, long, std::string>> seen;
  for (const auto& label : doc.at("labels")) {
    auto key = std::make_tuple(label.at("h").get<long>(), label.at("t").get<long>(),
                               label.at("r").get<std::string>());
    if (seen.insert(key).second) out.push_back(key);
  }
  return out;
}

}  // namespace

SampleCounts expected_sample_counts(const nlohmann::json& raw_corpus) {
  SampleCounts c;
  for (const auto& doc : raw_corpus) {
    ++c.relation;
    std::set<std::string> relations;
    std::set<std::pair<std::string, std::string>> heads;
    for (const auto& [h, t, r] : distinct_labels(doc)) {
      relations.insert(r);
      heads.emplace(r, doc.at("vertexSet").at(h).at(0).at("name").get<std::string>());
    }
    c.head += relations.size();
    c.fact += heads.size();
  }
  return c;
}

size_t distinct_label_count(const nlohmann::json& raw_corpus) {
  size_t n = 0;
  for (const auto& doc : raw_corpus) n += distinct_labels(doc).size();
  return n;
}

}  // namespace docrex::testing
