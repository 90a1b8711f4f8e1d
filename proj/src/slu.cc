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

#include "slu/slu.h"

#include <algorithm>

#include "slu/common.h"

namespace slu {

std::string SystemName(SystemId id) { return "S" + std::to_string(static_cast<int>(id)); }

SystemId ParseSystemId(const std::string &name) {
  if (name.size() == 2 && (name[0] == 'S' || name[0] == 's') && name[1] >= '1' &&
      name[1] <= '5') {
    return static_cast<SystemId>(name[1] - '0');
  }
  throw Error("unknown system '" + name + "' (expected S1..S5)");
}

namespace {

const SpeechActLabel kNoneLabel{kNoneAttribute, kNoneAttribute};

bool IsForest(SystemId s) { return s == SystemId::kS2 || s == SystemId::kS4; }

// Gold labels as seen by a system: category-only for forests, NONE/NONE for
// unannotated utterances.
std::vector<SpeechActLabel> TrainingTargets(const Utterance &u, SystemId system) {
  if (u.speech_acts.empty()) return {kNoneLabel};
  std::vector<SpeechActLabel> out;
  for (const SpeechActLabel &label : u.speech_acts) {
    SpeechActLabel target = label;
    if (IsForest(system)) target.attribute = kNoneAttribute;
    if (std::find(out.begin(), out.end(), target) == out.end()) out.push_back(target);
  }
  return out;
}

int LabelIndex(std::vector<SpeechActLabel> &inventory,
               std::map<SpeechActLabel, int> &index, const SpeechActLabel &label) {
  auto [it, inserted] = index.emplace(label, static_cast<int>(inventory.size()));
  if (inserted) inventory.push_back(label);
  return it->second;
}

void NameClasses(LinearModel &model, const std::vector<SpeechActLabel> &labels) {
  model.class_names.clear();
  for (const auto &l : labels) model.class_names.push_back(l.ToString());
}

}  // namespace

SpeechActModel TrainSpeechActSystem(const Corpus &corpus, SystemId system,
                                    const SpeechActHyperparams &hp, uint64_t seed,
                                    const RuleSet *rules) {
  SpeechActModel model;
  model.system = system;
  if (system == SystemId::kS1) {
    if (!rules) throw Error("system S1 needs a ruleset");
    model.rules = *rules;
    std::map<SpeechActLabel, int> index;
    for (const Rule &r : rules->rules) LabelIndex(model.labels, index, r.action);
    LabelIndex(model.labels, index, rules->fallback);
    return model;
  }

  bool annotated = false;
  for (const Dialog &d : corpus.dialogs) {
    for (const Utterance &u : d.utterances) annotated |= !u.speech_acts.empty();
  }
  if (!annotated) throw Error("corpus has no gold speech acts");

  std::map<SpeechActLabel, int> index;
  std::vector<std::vector<std::vector<int>>> targets(corpus.dialogs.size());
  for (size_t d = 0; d < corpus.dialogs.size(); ++d) {
    for (const Utterance &u : corpus.dialogs[d].utterances) {
      std::vector<int> ids;
      for (const auto &label : TrainingTargets(u, system)) {
        ids.push_back(LabelIndex(model.labels, index, label));
      }
      targets[d].push_back(std::move(ids));
    }
  }
  const int num_classes = static_cast<int>(model.labels.size());

  if (IsForest(system)) {
    model.history_depth = system == SystemId::kS2 ? 2 : 1;
    std::vector<LabeledDense> data;
    for (size_t d = 0; d < corpus.dialogs.size(); ++d) {
      const Dialog &dialog = corpus.dialogs[d];
      for (int i = 0; i < static_cast<int>(dialog.utterances.size()); ++i) {
        const auto x = ExtractDiscourseFeatures(dialog, i, model.history_depth).ToDense();
        for (int y : targets[d][i]) data.push_back({x, y});
      }
    }
    model.forest = TrainForest(data, num_classes, hp.forest, seed);
    model.forest->class_names.clear();
    for (const auto &l : model.labels) model.forest->class_names.push_back(l.category);
    return model;
  }

  model.vocab = BuildNgramVocab(corpus, hp.vocab_size);
  model.feature_config = hp.features;
  const int dim = SaFeatureDimension(model.vocab, model.feature_config);
  std::map<Speaker, std::vector<LabeledVector>> by_speaker;
  std::vector<LabeledVector> all;
  for (size_t d = 0; d < corpus.dialogs.size(); ++d) {
    const Dialog &dialog = corpus.dialogs[d];
    for (int i = 0; i < static_cast<int>(dialog.utterances.size()); ++i) {
      SparseVector x = ExtractSaFeatures(dialog, i, model.vocab, model.feature_config);
      for (int y : targets[d][i]) {
        LabeledVector item{x, y};
        if (system == SystemId::kS3) {
          by_speaker[dialog.utterances[i].speaker].push_back(std::move(item));
        } else {
          all.push_back(std::move(item));
        }
      }
    }
  }

  LinearTrainOptions options;
  options.tolerance = hp.tolerance;
  options.max_epochs = hp.max_epochs;
  if (system == SystemId::kS3) {
    options.regularization = hp.svm_c;
    for (Speaker speaker : {Speaker::kGuide, Speaker::kTourist}) {
      auto it = by_speaker.find(speaker);
      if (it == by_speaker.end()) {
        throw Error(std::string("system S3 needs training utterances for speaker ") +
                    SpeakerName(speaker));
      }
      LinearModel m = TrainSvm(it->second, num_classes, dim, options);
      NameClasses(m, model.labels);
      model.per_speaker.emplace(speaker, std::move(m));
    }
  } else {
    options.regularization = hp.logreg_l2;
    model.linear = TrainLogreg(all, num_classes, dim, options);
    NameClasses(*model.linear, model.labels);
  }
  return model;
}

std::vector<SpeechActLabel> PredictSpeechActs(const SpeechActModel &model,
                                              const Dialog &dialog) {
  if (model.system == SystemId::kS1) {
    if (!model.rules) throw Error("S1 model has no ruleset");
    return ApplyRules(*model.rules, dialog);
  }
  std::vector<SpeechActLabel> out;
  out.reserve(dialog.utterances.size());
  for (int i = 0; i < static_cast<int>(dialog.utterances.size()); ++i) {
    int label = 0;
    if (IsForest(model.system)) {
      if (!model.forest) throw Error("forest model missing");
      label = PredictForest(*model.forest,
                            ExtractDiscourseFeatures(dialog, i, model.history_depth).ToDense());
    } else {
      const SparseVector x = ExtractSaFeatures(dialog, i, model.vocab, model.feature_config);
      const LinearModel *linear = nullptr;
      if (model.system == SystemId::kS3) {
        auto it = model.per_speaker.find(dialog.utterances[i].speaker);
        if (it == model.per_speaker.end()) throw Error("S3 model lacks a speaker submodel");
        linear = &it->second;
      } else {
        if (!model.linear) throw Error("S5 model has no classifier");
        linear = &*model.linear;
      }
      label = PredictLinear(*linear, x).label;
    }
    out.push_back(model.labels.at(label));
  }
  return out;
}

std::vector<std::string> BioLabelNames(const std::set<std::string> &values) {
  std::vector<std::string> names{"O"};
  for (const std::string &v : values) {
    names.push_back("B-" + v);
    names.push_back("I-" + v);
  }
  return names;
}

SemanticModel TrainSemanticTagger(const Corpus &corpus, const Ontology &ontology,
                                  const SemanticHyperparams &hp) {
  std::array<std::set<std::string>, 4> values;
  for (const auto &[main, entry] : ontology) {
    values[static_cast<int>(AttributeKind::kMain)].insert(main);
    values[static_cast<int>(AttributeKind::kSub)].insert(entry.subcategories.begin(),
                                                         entry.subcategories.end());
    values[static_cast<int>(AttributeKind::kRel)].insert(entry.relative_modifiers.begin(),
                                                         entry.relative_modifiers.end());
    values[static_cast<int>(AttributeKind::kFromTo)].insert(entry.from_to_modifiers.begin(),
                                                            entry.from_to_modifiers.end());
  }
  bool annotated = false;
  std::vector<const Utterance *> utterances;
  for (const Dialog &d : corpus.dialogs) {
    for (const Utterance &u : d.utterances) {
      if (u.tokens.empty()) continue;
      utterances.push_back(&u);
      for (const SemanticSegment &seg : u.segments) {
        annotated = true;
        for (AttributeKind kind : kAllKinds) {
          if (auto v = SegmentValue(seg, kind)) values[static_cast<int>(kind)].insert(*v);
        }
      }
    }
  }
  if (!annotated) throw Error("corpus has no gold semantic segments");

  std::vector<FeatureSets> features;
  features.reserve(utterances.size());
  for (const Utterance *u : utterances) features.push_back(ExtractSequenceFeatures(u->tokens));

  SemanticModel model;
  model.ontology = ontology;
  CrfTrainOptions options;
  options.l2 = hp.l2;
  options.tolerance = hp.tolerance;
  options.max_iterations = hp.max_iterations;
  for (AttributeKind kind : kAllKinds) {
    const auto names = BioLabelNames(values[static_cast<int>(kind)]);
    std::map<std::string, int> label_id;
    for (size_t i = 0; i < names.size(); ++i) label_id[names[i]] = static_cast<int>(i);
    std::vector<CrfExample> data;
    data.reserve(utterances.size());
    for (size_t i = 0; i < utterances.size(); ++i) {
      CrfExample ex;
      ex.features = features[i];
      for (const std::string &label : SegmentsToBio(*utterances[i], kind)) {
        ex.labels.push_back(label_id.at(label));
      }
      data.push_back(std::move(ex));
    }
    model.crfs[static_cast<int>(kind)] = TrainCrf(data, names, options);
  }
  return model;
}

std::vector<SemanticSegment> CombineAttributeTags(const std::vector<std::string> &main_bio,
                                                  const std::vector<std::string> &sub_bio,
                                                  const std::vector<std::string> &rel_bio,
                                                  const std::vector<std::string> &ft_bio,
                                                  const Ontology &ontology) {
  const size_t n = main_bio.size();
  if (sub_bio.size() != n || rel_bio.size() != n || ft_bio.size() != n) {
    throw Error("attribute tag sequences differ in length");
  }
  const std::vector<Span> other[3] = {BioToSpans(sub_bio), BioToSpans(rel_bio),
                                      BioToSpans(ft_bio)};
  const AttributeKind other_kind[3] = {AttributeKind::kSub, AttributeKind::kRel,
                                       AttributeKind::kFromTo};
  std::vector<SemanticSegment> segments;
  for (const Span &span : BioToSpans(main_bio)) {
    SemanticSegment seg;
    seg.start = span.start;
    seg.end = span.end;
    seg.main = span.value;
    for (int k = 0; k < 3; ++k) {
      const std::set<std::string> *admissible =
          AdmissibleValues(ontology, span.value, other_kind[k]);
      if (!admissible) continue;
      // Per value: covered tokens of the main span and earliest start.
      std::map<std::string, std::pair<int, int>> coverage;
      for (const Span &s : other[k]) {
        const int overlap = std::min(s.end, span.end) - std::max(s.start, span.start);
        if (overlap <= 0 || !admissible->count(s.value)) continue;
        auto [it, inserted] = coverage.emplace(s.value, std::make_pair(overlap, s.start));
        if (!inserted) {
          it->second.first += overlap;
          it->second.second = std::min(it->second.second, s.start);
        }
      }
      const std::string *best = nullptr;
      std::pair<int, int> best_key{0, 0};
      for (const auto &[value, key] : coverage) {
        if (!best || key.first > best_key.first ||
            (key.first == best_key.first && key.second < best_key.second)) {
          best = &value;
          best_key = key;
        }
      }
      if (!best) continue;
      switch (other_kind[k]) {
        case AttributeKind::kSub: seg.sub = *best; break;
        case AttributeKind::kRel: seg.rel = *best; break;
        case AttributeKind::kFromTo: seg.from_to = *best; break;
        case AttributeKind::kMain: break;
      }
    }
    segments.push_back(std::move(seg));
  }
  return segments;
}

std::vector<SemanticSegment> PredictSegments(const SemanticModel &model,
                                             const Utterance &utterance) {
  if (utterance.tokens.empty()) return {};
  const FeatureSets features = ExtractSequenceFeatures(utterance.tokens);
  std::array<std::vector<std::string>, 4> tags;
  for (AttributeKind kind : kAllKinds) {
    const CrfModel &crf = model.crf(kind);
    for (int y : TagSequence(crf, features)) {
      tags[static_cast<int>(kind)].push_back(crf.label_names[y]);
    }
  }
  return CombineAttributeTags(tags[0], tags[1], tags[2], tags[3], model.ontology);
}

}  // namespace slu
