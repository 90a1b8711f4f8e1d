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

#include "slu/synthetic.h"

#include <cstdio>
#include <sstream>

#include "slu/common.h"

namespace slu {

namespace {

struct ActPattern {
  const char *category;
  const char *attribute;
  const char *keyword;
};

constexpr ActPattern kActs[] = {
    {"QST", "WHERE", "where"},     {"QST", "WHAT", "what"},
    {"QST", "HOW_MUCH", "cost"},   {"QST", "WHEN", "when"},
    {"QST", "RECOMMEND", "suggest"},
    {"RES", "POSITIVE", "yes"},    {"RES", "NEGATIVE", "no"},
    {"RES", "INFO", "actually"},   {"RES", "EXPLAIN", "because"},
    {"INI", "OPENING", "hello"},   {"INI", "RECOMMEND", "recommend"},
    {"INI", "INFO", "notice"},
    {"FOL", "ACK", "okay"},        {"FOL", "THANK", "thanks"},
    {"FOL", "CLOSING", "goodbye"}, {"FOL", "INFO", "right"},
};

struct Lexicon {
  const char *main;
  const char *sub;  // nullptr: entity without a subcategory
  std::vector<const char *> entries;
};

const std::vector<Lexicon> &Lexicons() {
  static const std::vector<Lexicon> lexicons = {
      {"LOC", "HOTEL", {"Raffles Hotel", "Hilton", "Fullerton"}},
      {"LOC", "RESTAURANT", {"Jumbo Seafood", "Lau Pa Sat", "Odette"}},
      {"LOC", "SHOP", {"Mustafa Centre", "Ion Orchard", "Tangs"}},
      {"LOC", nullptr, {"place", "spot"}},
      {"AREA", "CITY", {"Singapore", "Kuala Lumpur", "Bangkok"}},
      {"AREA", "COUNTRY", {"Malaysia", "Indonesia", "Thailand"}},
      {"AREA", nullptr, {"region", "district"}},
      {"TIME", "DATE", {"Monday", "Friday", "Christmas"}},
      {"TIME", "HOUR", {"noon", "midnight", "7pm"}},
      {"TIME", nullptr, {"later", "soon"}},
      {"FOOD", "DISH", {"laksa", "satay", "Chicken Rice"}},
      {"FOOD", "CUISINE", {"Peranakan", "Cantonese", "Indian"}},
      {"FOOD", nullptr, {"food", "snacks"}},
      {"TRSP", "BUS", {"bus", "shuttle"}},
      {"TRSP", "TRAIN", {"MRT", "train", "LRT"}},
      {"TRSP", "TAXI", {"taxi", "cab", "Grab"}},
      {"TRSP", nullptr, {"transport", "ride"}},
  };
  return lexicons;
}

struct Cue {
  const char *word;
  const char *value;
};

constexpr Cue kRelCues[] = {{"near", "NEAR"}, {"north", "NORTH"}, {"before", "BEFORE"},
                            {"after", "AFTER"}};
constexpr Cue kFromToCues[] = {{"from", "FROM"}, {"to", "TO"}};

constexpr const char *kFillers[] = {"i",     "we",    "would", "like",  "please", "the",
                                    "a",     "there", "is",    "it",    "can",    "you",
                                    "go",    "visit", "maybe", "think", "really", "good",
                                    "let",   "me",    "check", "and",   "also"};

const char *CueWord(const Cue *cues, size_t n, const std::string &value) {
  for (size_t i = 0; i < n; ++i) {
    if (value == cues[i].value) return cues[i].word;
  }
  throw Error("no cue word for '" + value + "'");
}

template <typename T>
const T &Pick(Rng &rng, const std::vector<T> &items) {
  return items[UniformIndex(rng, items.size())];
}

std::string PickFrom(Rng &rng, const std::set<std::string> &values) {
  auto it = values.begin();
  std::advance(it, static_cast<long>(UniformIndex(rng, values.size())));
  return *it;
}

Token MakeToken(const std::string &text, const char *coarse, const char *fine) {
  return Token{text, coarse, fine};
}

void AddFillers(Rng &rng, int count, std::vector<Token> &tokens) {
  constexpr size_t n = sizeof(kFillers) / sizeof(kFillers[0]);
  for (int i = 0; i < count; ++i) {
    tokens.push_back(MakeToken(kFillers[UniformIndex(rng, n)], "X", "FW"));
  }
}

// Appends an entity (with its optional cue word) and its gold segment.
void AddEntity(Rng &rng, const Ontology &ontology, Utterance &u) {
  const auto &lexicons = Lexicons();
  const Lexicon &lex = lexicons[UniformIndex(rng, lexicons.size())];
  const OntologyEntry &entry = ontology.at(lex.main);
  SemanticSegment seg;
  seg.main = lex.main;
  if (lex.sub) seg.sub = lex.sub;

  const double u_mod = UniformReal(rng);
  if (u_mod < 0.3 && !entry.relative_modifiers.empty()) {
    seg.rel = PickFrom(rng, entry.relative_modifiers);
    u.tokens.push_back(MakeToken(CueWord(kRelCues, std::size(kRelCues), *seg.rel), "ADP", "IN"));
  } else if (u_mod < 0.6 && !entry.from_to_modifiers.empty()) {
    seg.from_to = PickFrom(rng, entry.from_to_modifiers);
    u.tokens.push_back(
        MakeToken(CueWord(kFromToCues, std::size(kFromToCues), *seg.from_to), "ADP", "IN"));
  }

  std::istringstream words(lex.entries[UniformIndex(rng, lex.entries.size())]);
  seg.start = static_cast<int>(u.tokens.size());
  for (std::string w; words >> w;) {
    const bool proper = w[0] >= 'A' && w[0] <= 'Z';
    u.tokens.push_back(MakeToken(w, "NOUN", proper ? "NNP" : "NN"));
  }
  seg.end = static_cast<int>(u.tokens.size());
  u.segments.push_back(std::move(seg));
}

}  // namespace

Ontology SyntheticOntology() {
  Ontology o;
  o["LOC"] = {{"HOTEL", "RESTAURANT", "SHOP"}, {"NEAR"}, {"FROM", "TO"}};
  o["AREA"] = {{"CITY", "COUNTRY"}, {"NEAR", "NORTH"}, {"FROM", "TO"}};
  o["TIME"] = {{"DATE", "HOUR"}, {"BEFORE", "AFTER"}, {}};
  o["FOOD"] = {{"DISH", "CUISINE"}, {}, {}};
  o["TRSP"] = {{"BUS", "TRAIN", "TAXI"}, {}, {}};
  return o;
}

Corpus GenerateSyntheticCorpus(const SyntheticOptions &options) {
  if (options.num_dialogs < 1 || options.min_utterances < 1 ||
      options.max_utterances < options.min_utterances) {
    throw Error("invalid synthetic corpus options");
  }
  const Ontology ontology = SyntheticOntology();
  std::vector<std::vector<const ActPattern *>> by_category(4);
  const char *categories[] = {"QST", "RES", "INI", "FOL"};
  for (const ActPattern &a : kActs) {
    for (int c = 0; c < 4; ++c) {
      if (std::string(a.category) == categories[c]) by_category[c].push_back(&a);
    }
  }

  Rng rng(options.seed);
  Corpus corpus;
  for (int d = 0; d < options.num_dialogs; ++d) {
    Dialog dialog;
    char id[32];
    std::snprintf(id, sizeof(id), "dialog-%04d", d);
    dialog.id = id;
    const int length = options.min_utterances +
                       static_cast<int>(UniformIndex(
                           rng, options.max_utterances - options.min_utterances + 1));
    Speaker speaker = UniformReal(rng) < 0.5 ? Speaker::kGuide : Speaker::kTourist;
    bool prev_question = false;
    for (int i = 0; i < length; ++i) {
      const bool changed = i > 0 && UniformReal(rng) < 0.6;
      if (changed) speaker = speaker == Speaker::kGuide ? Speaker::kTourist : Speaker::kGuide;
      const bool question = UniformReal(rng) < 0.35;
      int category;
      if (question) {
        category = 0;
      } else if (changed && prev_question) {
        category = 1;
      } else {
        category = speaker == Speaker::kGuide ? 2 : 3;
      }
      const ActPattern &act = *Pick(rng, by_category[category]);

      Utterance u;
      u.index = i;
      u.speaker = speaker;
      AddFillers(rng, 1 + static_cast<int>(UniformIndex(rng, 2)), u.tokens);
      const double draw = UniformReal(rng);
      const int entities = draw < 0.3 ? 0 : (draw < 0.8 ? 1 : 2);
      const int keyword_slot = static_cast<int>(UniformIndex(rng, entities + 1));
      for (int e = 0; e <= entities; ++e) {
        if (e == keyword_slot) {
          u.tokens.push_back(MakeToken(act.keyword, "X", "UH"));
          AddFillers(rng, 1, u.tokens);
        }
        if (e < entities) {
          AddEntity(rng, ontology, u);
          AddFillers(rng, 1 + static_cast<int>(UniformIndex(rng, 2)), u.tokens);
        }
      }
      u.tokens.push_back(MakeToken(question ? "?" : ".", "PUNCT", "."));
      u.speech_acts.push_back({act.category, act.attribute});
      dialog.utterances.push_back(std::move(u));
      prev_question = question;
    }
    corpus.dialogs.push_back(std::move(dialog));
  }
  ValidateCorpus(corpus, "synthetic");
  return corpus;
}

}  // namespace slu
