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

#ifndef SLU_CORPUS_H_
#define SLU_CORPUS_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

namespace slu {

struct Token {
  std::string text;
  std::string pos_coarse;
  std::string pos_fine;

  bool operator==(const Token &) const = default;
};

enum class Speaker { kGuide, kTourist };

const char *SpeakerName(Speaker speaker);
Speaker ParseSpeaker(const std::string &name);

// One speech-act class. The attribute may be the sentinel "NONE".
struct SpeechActLabel {
  std::string category;
  std::string attribute;

  auto operator<=>(const SpeechActLabel &) const = default;
  std::string ToString() const { return category + "_" + attribute; }
};

inline constexpr const char *kNoneAttribute = "NONE";

// Token span [start, end) with a main category and optional modifiers.
struct SemanticSegment {
  int start = 0;
  int end = 0;
  std::string main;
  std::optional<std::string> sub;
  std::optional<std::string> rel;
  std::optional<std::string> from_to;

  auto operator<=>(const SemanticSegment &) const = default;
};

struct Utterance {
  int index = 0;
  Speaker speaker = Speaker::kGuide;
  std::vector<Token> tokens;
  // Kept in file order; duplicates are rejected on load.
  std::vector<SpeechActLabel> speech_acts;
  std::vector<SemanticSegment> segments;
};

struct Dialog {
  std::string id;
  std::vector<Utterance> utterances;
};

struct Corpus {
  std::vector<Dialog> dialogs;

  size_t NumUtterances() const;
};

struct OntologyEntry {
  std::set<std::string> subcategories;
  std::set<std::string> relative_modifiers;
  std::set<std::string> from_to_modifiers;

  bool operator==(const OntologyEntry &) const = default;
};

// Main category -> admissible attribute values.
using Ontology = std::map<std::string, OntologyEntry>;

// The four independently tagged attribute kinds of a semantic segment.
enum class AttributeKind { kMain, kSub, kRel, kFromTo };

inline constexpr AttributeKind kAllKinds[] = {
    AttributeKind::kMain, AttributeKind::kSub, AttributeKind::kRel,
    AttributeKind::kFromTo};

const char *KindName(AttributeKind kind);

// Value of the given kind carried by a segment, if any.
std::optional<std::string> SegmentValue(const SemanticSegment &segment,
                                        AttributeKind kind);

// Admissible values of a kind under a main category; nullptr for kMain or an
// unknown main category.
const std::set<std::string> *AdmissibleValues(const Ontology &ontology,
                                              const std::string &main,
                                              AttributeKind kind);

struct Span {
  int start = 0;
  int end = 0;
  std::string value;

  auto operator<=>(const Span &) const = default;
};

// Loading. Both throw IoError on I/O failure and SchemaError naming the
// offending dialog/utterance/field on any invariant violation.
Corpus LoadCorpus(const std::string &path);
Corpus ParseCorpus(const nlohmann::json &doc, const std::string &source = "");
Ontology LoadOntology(const std::string &path);
Ontology ParseOntology(const std::string &text, const std::string &source = "");

// Throws SchemaError when an invariant does not hold.
void ValidateCorpus(const Corpus &corpus, const std::string &source = "");

nlohmann::json CorpusToJson(const Corpus &corpus);
nlohmann::json OntologyToJson(const Ontology &ontology);
nlohmann::json SegmentToJson(const SemanticSegment &segment);
nlohmann::json SpeechActToJson(const SpeechActLabel &label);

// BIO codec. Labels are "O", "B-<v>" or "I-<v>".
std::vector<std::string> SegmentsToBio(const Utterance &utterance,
                                       AttributeKind kind);
// Maximal spans; a dangling "I-v" opens a new span as if it were "B-v".
std::vector<Span> BioToSpans(const std::vector<std::string> &labels);

// Dialog id -> fold in [0, k). Ids are sorted, shuffled with a seeded
// Fisher-Yates pass and dealt round-robin.
std::map<std::string, int> SplitFolds(const Corpus &corpus, int k,
                                      uint64_t seed);

// Train/test partition for one fold of a SplitFolds assignment.
std::pair<Corpus, Corpus> PartitionFold(const Corpus &corpus,
                                        const std::map<std::string, int> &folds,
                                        int fold);

// Writes text to path via a temporary file and rename, so readers never see
// a partially written file.
void WriteFileAtomic(const std::string &path, const std::string &text);
std::string ReadFile(const std::string &path);

}  // namespace slu

#endif  // SLU_CORPUS_H_
