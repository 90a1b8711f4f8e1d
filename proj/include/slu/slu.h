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

#ifndef SLU_SLU_H_
#define SLU_SLU_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "slu/corpus.h"
#include "slu/crf.h"
#include "slu/features.h"
#include "slu/forest.h"
#include "slu/linear.h"
#include "slu/rules.h"

namespace slu {

// S1 rules, S2/S4 discourse forests (history 2/1), S3 per-speaker linear
// SVMs, S5 one speaker-independent logistic regression.
enum class SystemId { kS1 = 1, kS2, kS3, kS4, kS5 };

std::string SystemName(SystemId id);
SystemId ParseSystemId(const std::string &name);

struct SpeechActHyperparams {
  double svm_c = 1.0;
  double logreg_l2 = 1.0;
  double tolerance = 1e-4;
  int max_epochs = 300;
  size_t vocab_size = 5000;
  SaFeatureConfig features;
  ForestParams forest;
};

struct SpeechActModel {
  SystemId system = SystemId::kS5;
  std::vector<SpeechActLabel> labels;  // class index -> label
  // S3 and S5
  Vocabulary vocab;
  SaFeatureConfig feature_config;
  std::map<Speaker, LinearModel> per_speaker;  // S3
  std::optional<LinearModel> linear;           // S5
  // S2 and S4
  int history_depth = 0;
  std::optional<ForestModel> forest;
  // S1
  std::optional<RuleSet> rules;
};

// Label inventory is the distinct gold pairs in first-appearance order.
// Utterances with several gold pairs yield one training instance per pair;
// utterances with none train a (NONE, NONE) class. Forest systems learn
// categories only and predict attribute NONE. S1 needs a ruleset and learns
// nothing.
SpeechActModel TrainSpeechActSystem(const Corpus &corpus, SystemId system,
                                    const SpeechActHyperparams &hyperparams,
                                    uint64_t seed, const RuleSet *rules = nullptr);

// Exactly one label per utterance, left to right.
std::vector<SpeechActLabel> PredictSpeechActs(const SpeechActModel &model,
                                              const Dialog &dialog);

struct SemanticHyperparams {
  double l2 = 0.1;
  double tolerance = 1e-3;
  int max_iterations = 300;
};

struct SemanticModel {
  std::array<CrfModel, 4> crfs;  // indexed by AttributeKind
  Ontology ontology;

  const CrfModel &crf(AttributeKind kind) const { return crfs[static_cast<int>(kind)]; }
};

// Label set of a kind: "O", then B-/I- for every value in sorted order.
std::vector<std::string> BioLabelNames(const std::set<std::string> &values);

SemanticModel TrainSemanticTagger(const Corpus &corpus, const Ontology &ontology,
                                  const SemanticHyperparams &hyperparams);

// One segment per MAIN span. For each other kind, the admissible value whose
// spans cover the most tokens of the main span is kept (earliest span start
// on ties); no admissible value leaves the attribute absent.
std::vector<SemanticSegment> CombineAttributeTags(const std::vector<std::string> &main_bio,
                                                  const std::vector<std::string> &sub_bio,
                                                  const std::vector<std::string> &rel_bio,
                                                  const std::vector<std::string> &ft_bio,
                                                  const Ontology &ontology);

std::vector<SemanticSegment> PredictSegments(const SemanticModel &model,
                                             const Utterance &utterance);

using AnyModel = std::variant<SpeechActModel, SemanticModel>;

inline constexpr const char *kModelFormat = "slu-model/1";

// Canonical text: sorted keys, round-trip doubles, FNV-1a checksum over the
// payload. Throws IoError, or SchemaError on version mismatch or corruption.
std::string SerializeModel(const AnyModel &model);
AnyModel DeserializeModel(const std::string &text, const std::string &source = "");
void SaveModel(const AnyModel &model, const std::string &path);
AnyModel LoadModel(const std::string &path);

}  // namespace slu

#endif  // SLU_SLU_H_
