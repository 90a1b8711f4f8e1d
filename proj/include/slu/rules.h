// Copyright 2026 The SLU Toolkit Authors.
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

#ifndef SLU_RULES_H_
#define SLU_RULES_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "slu/corpus.h"

namespace slu {

enum class PredicateKind {
  kEndsWithToken,
  kContainsToken,
  kSpeakerIs,
  kSpeakerChanged,
  kPrevPredCategoryIs,
  kUtteranceIndexIs,
  kTokenCountLt,
};

struct Predicate {
  PredicateKind kind;
  std::string argument;  // token text, speaker or category; empty when unused
  int number = 0;        // for kUtteranceIndexIs and kTokenCountLt

  std::string ToString() const;
  bool operator==(const Predicate &) const = default;
};

struct Rule {
  std::vector<Predicate> conditions;  // conjunction, never empty
  SpeechActLabel action;

  bool operator==(const Rule &) const = default;
};

struct RuleSet {
  std::vector<Rule> rules;  // first match wins
  SpeechActLabel fallback;

  bool operator==(const RuleSet &) const = default;
};

// Grammar: name, or name(argument). Throws SchemaError naming an unknown
// predicate or a malformed argument.
Predicate ParsePredicate(const std::string &text);

// Accepts either a list of {"if": [...], "then": {...}} entries closed by a
// {"default": {...}} entry, or an object {"rules": <that list>, ...} whose
// other keys are ignored. Token comparisons are case-insensitive.
RuleSet ParseRuleset(const std::string &text, const std::string &source = "");
RuleSet LoadRuleset(const std::string &path);
nlohmann::json RulesetToJson(const RuleSet &ruleset);
RuleSet RulesetFromJson(const nlohmann::json &doc, const std::string &source = "");

// One label per utterance, in order. prev_pred_category_is reads the
// ruleset's own prediction for the previous utterance.
std::vector<SpeechActLabel> ApplyRules(const RuleSet &ruleset, const Dialog &dialog);

}  // namespace slu

#endif  // SLU_RULES_H_
