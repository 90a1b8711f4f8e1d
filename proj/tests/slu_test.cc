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

#include <filesystem>

#include "doctest.h"
#include "oracles.h"
#include "slu/common.h"
#include "slu/synthetic.h"

namespace slu {
namespace {

using Bio = std::vector<std::string>;

Corpus SmallCorpus(int dialogs, uint64_t seed) {
  SyntheticOptions opts;
  opts.num_dialogs = dialogs;
  opts.seed = seed;
  return GenerateSyntheticCorpus(opts);
}

SpeechActHyperparams FastHyperparams() {
  SpeechActHyperparams hp;
  hp.forest.num_trees = 10;
  return hp;
}

std::string TempPath(const std::string &name) {
  return (std::filesystem::temp_directory_path() / ("slu_slu_test_" + name)).string();
}

Ontology LocOntology(std::set<std::string> subs) {
  Ontology o;
  o["LOC"].subcategories = std::move(subs);
  return o;
}

TEST_CASE("label inventory has one class per distinct gold pair") {
  Corpus c;
  Dialog d{"d", {}};
  const char *cats[] = {"QST", "RES", "INI", "FOL"};
  for (int k = 0; k < 4; ++k) {
    for (int a = 0; a < 22; ++a) {
      Utterance u = oracle::MakeUtterance({"w" + std::to_string(a), cats[k]},
                                          (a % 2) ? Speaker::kGuide : Speaker::kTourist);
      u.index = static_cast<int>(d.utterances.size());
      u.speech_acts.push_back({cats[k], "ATTR" + std::to_string(a)});
      d.utterances.push_back(u);
    }
  }
  c.dialogs.push_back(d);
  SpeechActHyperparams hp = FastHyperparams();
  hp.max_epochs = 20;
  const SpeechActModel m = TrainSpeechActSystem(c, SystemId::kS5, hp, 1);
  CHECK(m.labels.size() == 88);
  CHECK(m.labels[0] == SpeechActLabel{"QST", "ATTR0"});
  CHECK(m.labels[87] == SpeechActLabel{"FOL", "ATTR21"});
}

TEST_CASE("multi-label and empty gold") {
  Corpus c;
  Dialog d{"d", {}};
  Utterance a = oracle::MakeUtterance({"hi", "there"}, Speaker::kGuide);
  a.speech_acts = {{"INI", "OPENING"}, {"FOL", "INFO"}};
  Utterance b = oracle::MakeUtterance({"ok"}, Speaker::kTourist);
  b.index = 1;
  d.utterances = {a, b};
  c.dialogs.push_back(d);
  const SpeechActModel m = TrainSpeechActSystem(c, SystemId::kS5, FastHyperparams(), 1);
  CHECK(m.labels == std::vector<SpeechActLabel>{{"INI", "OPENING"}, {"FOL", "INFO"}, {"NONE", "NONE"}});
}

TEST_CASE("speech-act systems") {
  const Corpus c = SmallCorpus(12, 3);
  const SpeechActHyperparams hp = FastHyperparams();

  SUBCASE("S3 needs both speakers") {
    Corpus guides = c;
    for (auto &d : guides.dialogs) {
      std::erase_if(d.utterances, [](const Utterance &u) { return u.speaker == Speaker::kTourist; });
      for (size_t i = 0; i < d.utterances.size(); ++i) d.utterances[i].index = static_cast<int>(i);
    }
    CHECK_THROWS_WITH_AS(TrainSpeechActSystem(guides, SystemId::kS3, hp, 1),
                         doctest::Contains("TOURIST"), Error);
  }
  SUBCASE("S3 routes by speaker") {
    const SpeechActModel m = TrainSpeechActSystem(c, SystemId::kS3, hp, 1);
    REQUIRE(m.per_speaker.size() == 2);
    const Dialog &d = c.dialogs[0];
    const auto pred = PredictSpeechActs(m, d);
    for (size_t i = 0; i < d.utterances.size(); ++i) {
      const SparseVector x = ExtractSaFeatures(d, static_cast<int>(i), m.vocab, m.feature_config);
      const int k = PredictLinear(m.per_speaker.at(d.utterances[i].speaker), x).label;
      CHECK(pred[i] == m.labels[k]);
    }
  }
  SUBCASE("S5 with zero weights predicts inventory entry 0") {
    SpeechActModel m = TrainSpeechActSystem(c, SystemId::kS5, hp, 1);
    std::fill(m.linear->weights.begin(), m.linear->weights.end(), 0.0);
    std::fill(m.linear->bias.begin(), m.linear->bias.end(), 0.0);
    for (const auto &label : PredictSpeechActs(m, c.dialogs[1])) CHECK(label == m.labels[0]);
  }
  SUBCASE("S2 and S4 differ only in history depth") {
    const SpeechActModel s2 = TrainSpeechActSystem(c, SystemId::kS2, hp, 4);
    const SpeechActModel s4 = TrainSpeechActSystem(c, SystemId::kS4, hp, 4);
    CHECK(s2.history_depth == 2);
    CHECK(s4.history_depth == 1);
    CHECK(s2.forest->num_features == 6);
    CHECK(s4.forest->num_features == 5);
    CHECK(s2.labels == s4.labels);
    for (const auto &l : s2.labels) CHECK(l.attribute == kNoneAttribute);
  }
  SUBCASE("S1 delegates to the ruleset") {
    const RuleSet rs = ParseRuleset(R"J([
        {"if": ["ends_with_token(?)"], "then": {"category": "QST", "attribute": "NONE"}},
        {"if": ["prev_pred_category_is(QST)", "speaker_changed"], "then": {"category": "RES", "attribute": "NONE"}},
        {"default": {"category": "FOL", "attribute": "NONE"}}])J");
    CHECK_THROWS_AS(TrainSpeechActSystem(c, SystemId::kS1, hp, 1), Error);
    const SpeechActModel m = TrainSpeechActSystem(c, SystemId::kS1, hp, 1, &rs);
    Dialog d{"q", {oracle::MakeUtterance({"Is", "it", "far", "?"}, Speaker::kTourist),
                   oracle::MakeUtterance({"No", "."}, Speaker::kGuide)}};
    d.utterances[1].index = 1;
    CHECK(PredictSpeechActs(m, d) ==
          std::vector<SpeechActLabel>{{"QST", "NONE"}, {"RES", "NONE"}});
  }
  SUBCASE("every system emits one label per utterance") {
    const RuleSet rs = LoadRuleset(std::string(SLU_SOURCE_DIR) + "/data/rules/default_rules.json");
    for (SystemId s : {SystemId::kS1, SystemId::kS2, SystemId::kS3, SystemId::kS4, SystemId::kS5}) {
      const SpeechActModel m = TrainSpeechActSystem(c, s, hp, 2, &rs);
      for (const auto &d : c.dialogs) CHECK(PredictSpeechActs(m, d).size() == d.utterances.size());
    }
  }
  SUBCASE("system names") {
    CHECK(SystemName(SystemId::kS3) == "S3");
    CHECK(ParseSystemId("S4") == SystemId::kS4);
    CHECK_THROWS_AS(ParseSystemId("S9"), Error);
  }
}

TEST_CASE("combine_attribute_tags") {
  const Bio o2 = {"O", "O"};
  CHECK(CombineAttributeTags({"B-LOC", "I-LOC"}, {"B-AREA", "I-AREA"}, o2, o2, LocOntology({"AREA"})) ==
        std::vector<SemanticSegment>{{0, 2, "LOC", "AREA", {}, {}}});
  CHECK(CombineAttributeTags({"B-LOC", "I-LOC"}, {"B-AREA", "I-AREA"}, o2, o2, LocOntology({})) ==
        std::vector<SemanticSegment>{{0, 2, "LOC", {}, {}, {}}});

  const Bio o3 = {"O", "O", "O"};
  CHECK(CombineAttributeTags({"B-LOC", "I-LOC", "I-LOC"}, {"B-AREA", "B-STATION", "I-STATION"}, o3,
                             o3, LocOntology({"AREA", "STATION"})) ==
        std::vector<SemanticSegment>{{0, 3, "LOC", "STATION", {}, {}}});
  // Equal coverage: the earlier span wins.
  CHECK(CombineAttributeTags({"B-LOC", "I-LOC"}, {"B-STATION", "B-AREA"}, o2, o2,
                             LocOntology({"AREA", "STATION"}))[0]
            .sub == std::optional<std::string>("STATION"));
  // Attributes outside any main span are dropped.
  CHECK(CombineAttributeTags({"O", "B-LOC"}, {"B-AREA", "O"}, o2, o2, LocOntology({"AREA"})) ==
        std::vector<SemanticSegment>{{1, 2, "LOC", {}, {}, {}}});
  CHECK(CombineAttributeTags({}, {}, {}, {}, LocOntology({})).empty());
  CHECK_THROWS_AS(CombineAttributeTags({"O"}, o2, o2, o2, LocOntology({})), Error);
}

TEST_CASE("combination never violates the ontology") {
  Rng rng(77);
  const Ontology ont = SyntheticOntology();
  std::vector<std::string> values;
  for (const auto &[main, e] : ont) {
    values.push_back(main);
    for (const auto *s : {&e.subcategories, &e.relative_modifiers, &e.from_to_modifiers}) {
      values.insert(values.end(), s->begin(), s->end());
    }
  }
  auto random_bio = [&](int n) {
    Bio bio;
    for (int t = 0; t < n; ++t) {
      const size_t r = UniformIndex(rng, 3);
      bio.push_back(r == 0 ? "O" : (r == 1 ? "B-" : "I-") + values[UniformIndex(rng, values.size())]);
    }
    return bio;
  };
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = static_cast<int>(UniformIndex(rng, 9));
    const Bio main = random_bio(n);
    const auto segs = CombineAttributeTags(main, random_bio(n), random_bio(n), random_bio(n), ont);
    const auto spans = BioToSpans(main);
    REQUIRE(segs.size() == spans.size());
    for (size_t i = 0; i < segs.size(); ++i) {
      CHECK(segs[i].start == spans[i].start);
      CHECK(segs[i].end == spans[i].end);
      CHECK(segs[i].main == spans[i].value);
      if (i > 0) CHECK(segs[i - 1].end <= segs[i].start);
      for (AttributeKind kind : {AttributeKind::kSub, AttributeKind::kRel, AttributeKind::kFromTo}) {
        if (auto v = SegmentValue(segs[i], kind)) {
          const auto *allowed = AdmissibleValues(ont, segs[i].main, kind);
          REQUIRE(allowed != nullptr);
          CHECK(allowed->count(*v) == 1);
        }
      }
    }
  }
}

TEST_CASE("semantic tagger") {
  SemanticHyperparams hp;
  SUBCASE("main-only corpus gives all-O attribute models") {
    Corpus c;
    Dialog d{"d", {}};
    for (int i = 0; i < 4; ++i) {
      Utterance u = oracle::MakeUtterance({"go", "to", "Paris", "now"});
      u.index = i;
      u.segments.push_back({2, 3, "LOC", {}, {}, {}});
      d.utterances.push_back(u);
    }
    c.dialogs.push_back(d);
    const SemanticModel m = TrainSemanticTagger(c, LocOntology({"CITY"}), hp);
    CHECK(m.crf(AttributeKind::kRel).label_names == std::vector<std::string>{"O"});
    CHECK(m.crf(AttributeKind::kSub).label_names == std::vector<std::string>{"O", "B-CITY", "I-CITY"});
    const Utterance probe = oracle::MakeUtterance({"see", "Paris", "soon"});
    CHECK(TagSequence(m.crf(AttributeKind::kSub), ExtractSequenceFeatures(probe.tokens)) ==
          std::vector<int>{0, 0, 0});
    CHECK(PredictSegments(m, probe) == std::vector<SemanticSegment>{{1, 2, "LOC", {}, {}, {}}});
    CHECK(PredictSegments(m, Utterance{}).empty());
  }
  SUBCASE("zero weights give no segments") {
    const Corpus c = SmallCorpus(3, 9);
    SemanticModel m = TrainSemanticTagger(c, SyntheticOntology(), hp);
    for (auto &crf : m.crfs) {
      std::fill(crf.emission.begin(), crf.emission.end(), 0.0);
      std::fill(crf.transition.begin(), crf.transition.end(), 0.0);
    }
    for (const auto &u : c.dialogs[0].utterances) CHECK(PredictSegments(m, u).empty());
  }
  SUBCASE("no segments is an error") {
    Corpus c;
    c.dialogs.push_back({"d", {oracle::MakeUtterance({"hi"})}});
    CHECK_THROWS_AS(TrainSemanticTagger(c, Ontology{}, hp), Error);
  }
}

TEST_CASE("model persistence") {
  const Corpus c = SmallCorpus(10, 5);
  const SpeechActHyperparams hp = FastHyperparams();
  const RuleSet rs = LoadRuleset(std::string(SLU_SOURCE_DIR) + "/data/rules/default_rules.json");

  SUBCASE("speech-act round trips keep predictions") {
    for (SystemId s : {SystemId::kS1, SystemId::kS2, SystemId::kS3, SystemId::kS4, SystemId::kS5}) {
      const SpeechActModel m = TrainSpeechActSystem(c, s, hp, 6, &rs);
      const std::string path = TempPath("sa.json");
      SaveModel(m, path);
      const AnyModel loaded = LoadModel(path);
      REQUIRE(std::holds_alternative<SpeechActModel>(loaded));
      const auto &back = std::get<SpeechActModel>(loaded);
      for (const auto &d : c.dialogs) CHECK(PredictSpeechActs(back, d) == PredictSpeechActs(m, d));
      CHECK(SerializeModel(back) == SerializeModel(m));
      std::filesystem::remove(path);
    }
  }
  SUBCASE("semantic round trip keeps predictions") {
    const SemanticModel m = TrainSemanticTagger(SmallCorpus(4, 5), SyntheticOntology(), {});
    const auto back = std::get<SemanticModel>(DeserializeModel(SerializeModel(m)));
    for (const auto &d : c.dialogs) {
      for (const auto &u : d.utterances) CHECK(PredictSegments(back, u) == PredictSegments(m, u));
    }
    CHECK(SerializeModel(back) == SerializeModel(m));
  }
  SUBCASE("tampering and version checks") {
    const SpeechActModel m = TrainSpeechActSystem(c, SystemId::kS4, hp, 6);
    nlohmann::json doc = nlohmann::json::parse(SerializeModel(m));
    nlohmann::json tampered = doc;
    tampered["payload"]["history_depth"] = 2;
    CHECK_THROWS_WITH_AS(DeserializeModel(tampered.dump()), doctest::Contains("corrupt"), SchemaError);
    nlohmann::json bad_sum = doc;
    bad_sum["checksum"] = "0000000000000000";
    CHECK_THROWS_WITH_AS(DeserializeModel(bad_sum.dump()), doctest::Contains("checksum"), SchemaError);
    nlohmann::json future = doc;
    future["format"] = "slu-model/2";
    try {
      DeserializeModel(future.dump());
      FAIL("expected a version error");
    } catch (const SchemaError &e) {
      const std::string msg = e.what();
      CHECK(msg.find("slu-model/2") != std::string::npos);
      CHECK(msg.find("slu-model/1") != std::string::npos);
    }
    CHECK_THROWS_AS(DeserializeModel("not json"), SchemaError);
    CHECK_THROWS_AS(LoadModel(TempPath("missing.json")), IoError);
  }
  SUBCASE("identical training gives identical bytes") {
    CHECK(SerializeModel(TrainSpeechActSystem(c, SystemId::kS3, hp, 6)) ==
          SerializeModel(TrainSpeechActSystem(c, SystemId::kS3, hp, 6)));
    CHECK(SerializeModel(TrainSpeechActSystem(c, SystemId::kS2, hp, 6)) ==
          SerializeModel(TrainSpeechActSystem(c, SystemId::kS2, hp, 6)));
  }
}

}  // namespace
}  // namespace slu
