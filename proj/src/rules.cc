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

#include "slu/rules.h"

#include <charconv>

#include "slu/common.h"
#include "slu/features.h"

namespace slu {

using nlohmann::json;

namespace {

struct PredicateSpec {
  const char *name;
  PredicateKind kind;
  enum { kNone, kText, kNumber } argument;
};

constexpr PredicateSpec kPredicates[] = {
    {"ends_with_token", PredicateKind::kEndsWithToken, PredicateSpec::kText},
    {"contains_token", PredicateKind::kContainsToken, PredicateSpec::kText},
    {"speaker_is", PredicateKind::kSpeakerIs, PredicateSpec::kText},
    {"speaker_changed", PredicateKind::kSpeakerChanged, PredicateSpec::kNone},
    {"prev_pred_category_is", PredicateKind::kPrevPredCategoryIs, PredicateSpec::kText},
    {"utterance_index_is", PredicateKind::kUtteranceIndexIs, PredicateSpec::kNumber},
    {"token_count_lt", PredicateKind::kTokenCountLt, PredicateSpec::kNumber},
};

const PredicateSpec &SpecFor(PredicateKind kind) {
  for (const auto &spec : kPredicates) {
    if (spec.kind == kind) return spec;
  }
  throw Error("unknown predicate kind");
}

SpeechActLabel LabelFromJson(const json &j, const std::string &where) {
  if (!j.is_object() || !j.contains("category") || !j["category"].is_string() ||
      j["category"].get<std::string>().empty()) {
    throw SchemaError(where + ": label needs a non-empty string 'category'");
  }
  SpeechActLabel label{j["category"].get<std::string>(), kNoneAttribute};
  if (j.contains("attribute")) {
    if (!j["attribute"].is_string()) throw SchemaError(where + ": 'attribute' is not a string");
    label.attribute = j["attribute"].get<std::string>();
    if (label.attribute.empty()) label.attribute = kNoneAttribute;
  }
  return label;
}

bool Holds(const Predicate &p, const Dialog &dialog, int index,
           const std::vector<SpeechActLabel> &predicted) {
  const Utterance &u = dialog.utterances[index];
  switch (p.kind) {
    case PredicateKind::kEndsWithToken:
      return !u.tokens.empty() && Lowercase(u.tokens.back().text) == Lowercase(p.argument);
    case PredicateKind::kContainsToken: {
      const std::string want = Lowercase(p.argument);
      for (const Token &t : u.tokens) {
        if (Lowercase(t.text) == want) return true;
      }
      return false;
    }
    case PredicateKind::kSpeakerIs:
      return SpeakerName(u.speaker) == p.argument;
    case PredicateKind::kSpeakerChanged:
      return index > 0 && dialog.utterances[index - 1].speaker != u.speaker;
    case PredicateKind::kPrevPredCategoryIs:
      return index > 0 && predicted[index - 1].category == p.argument;
    case PredicateKind::kUtteranceIndexIs:
      return index == p.number;
    case PredicateKind::kTokenCountLt:
      return static_cast<int>(u.tokens.size()) < p.number;
  }
  return false;
}

}  // namespace

std::string Predicate::ToString() const {
  const PredicateSpec &spec = SpecFor(kind);
  switch (spec.argument) {
    case PredicateSpec::kNone: return spec.name;
    case PredicateSpec::kText: return std::string(spec.name) + "(" + argument + ")";
    case PredicateSpec::kNumber:
      return std::string(spec.name) + "(" + std::to_string(number) + ")";
  }
  return spec.name;
}

Predicate ParsePredicate(const std::string &text) {
  std::string name = text;
  std::string argument;
  bool has_argument = false;
  const size_t open = text.find('(');
  if (open != std::string::npos) {
    if (text.back() != ')') throw SchemaError("predicate '" + text + "': missing ')'");
    name = text.substr(0, open);
    argument = text.substr(open + 1, text.size() - open - 2);
    has_argument = true;
  }
  for (const auto &spec : kPredicates) {
    if (name != spec.name) continue;
    Predicate p{spec.kind, "", 0};
    if (spec.argument == PredicateSpec::kNone) {
      if (has_argument) throw SchemaError("predicate '" + name + "' takes no argument");
      return p;
    }
    if (!has_argument || argument.empty()) {
      throw SchemaError("predicate '" + name + "' needs an argument");
    }
    if (spec.argument == PredicateSpec::kNumber) {
      auto [ptr, ec] = std::from_chars(argument.data(), argument.data() + argument.size(), p.number);
      if (ec != std::errc() || ptr != argument.data() + argument.size()) {
        throw SchemaError("predicate '" + name + "' needs an integer argument, got '" +
                          argument + "'");
      }
    } else {
      if (spec.kind == PredicateKind::kSpeakerIs && argument != "GUIDE" &&
          argument != "TOURIST") {
        throw SchemaError("predicate 'speaker_is' needs GUIDE or TOURIST, got '" +
                          argument + "'");
      }
      p.argument = argument;
    }
    return p;
  }
  throw SchemaError("unknown predicate '" + name + "'");
}

RuleSet RulesetFromJson(const json &doc, const std::string &source) {
  const std::string prefix = source.empty() ? "rules" : source;
  const json *entries = &doc;
  if (doc.is_object()) {
    if (!doc.contains("rules")) throw SchemaError(prefix + ": missing 'rules' list");
    entries = &doc["rules"];
  }
  if (!entries->is_array()) throw SchemaError(prefix + ": rules must be a list");
  RuleSet ruleset;
  bool has_default = false;
  for (size_t i = 0; i < entries->size(); ++i) {
    const json &entry = (*entries)[i];
    const std::string where = prefix + ": entry " + std::to_string(i);
    if (!entry.is_object()) throw SchemaError(where + ": not an object");
    if (has_default) throw SchemaError(where + ": entries after the default");
    if (entry.contains("default")) {
      ruleset.fallback = LabelFromJson(entry["default"], where);
      has_default = true;
      continue;
    }
    if (!entry.contains("if") || !entry["if"].is_array() || entry["if"].empty()) {
      throw SchemaError(where + ": 'if' must be a non-empty list of predicates");
    }
    if (!entry.contains("then")) throw SchemaError(where + ": missing 'then'");
    Rule rule;
    for (const json &cond : entry["if"]) {
      if (!cond.is_string()) throw SchemaError(where + ": predicate is not a string");
      try {
        rule.conditions.push_back(ParsePredicate(cond.get<std::string>()));
      } catch (const SchemaError &e) {
        throw SchemaError(where + ": " + e.what());
      }
    }
    rule.action = LabelFromJson(entry["then"], where);
    ruleset.rules.push_back(std::move(rule));
  }
  if (!has_default) throw SchemaError(prefix + ": missing default entry");
  return ruleset;
}

RuleSet ParseRuleset(const std::string &text, const std::string &source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    // e.what() carries the line and column of the failure.
    throw SchemaError((source.empty() ? "rules" : source) + ": " + e.what());
  }
  return RulesetFromJson(doc, source);
}

RuleSet LoadRuleset(const std::string &path) { return ParseRuleset(ReadFile(path), path); }

json RulesetToJson(const RuleSet &ruleset) {
  json entries = json::array();
  for (const Rule &rule : ruleset.rules) {
    json conditions = json::array();
    for (const Predicate &p : rule.conditions) conditions.push_back(p.ToString());
    entries.push_back({{"if", conditions}, {"then", SpeechActToJson(rule.action)}});
  }
  entries.push_back({{"default", SpeechActToJson(ruleset.fallback)}});
  return entries;
}

std::vector<SpeechActLabel> ApplyRules(const RuleSet &ruleset, const Dialog &dialog) {
  std::vector<SpeechActLabel> predicted;
  predicted.reserve(dialog.utterances.size());
  for (int i = 0; i < static_cast<int>(dialog.utterances.size()); ++i) {
    const SpeechActLabel *label = &ruleset.fallback;
    for (const Rule &rule : ruleset.rules) {
      bool fires = true;
      for (const Predicate &p : rule.conditions) {
        if (!Holds(p, dialog, i, predicted)) {
          fires = false;
          break;
        }
      }
      if (fires) {
        label = &rule.action;
        break;
      }
    }
    predicted.push_back(*label);
  }
  return predicted;
}

}  // namespace slu
