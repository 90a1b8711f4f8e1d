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

#include <cinttypes>
#include <cstdio>

#include "json.hpp"
#include "slu/common.h"
#include "slu/slu.h"

namespace slu {

using nlohmann::json;

namespace {

std::string Fnv1a64(const std::string &text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

template <typename T>
T Get(const json &j, const char *key) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(std::string("model file: missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &) {
    throw SchemaError(std::string("model file: field '") + key + "' has the wrong type");
  }
}

json LinearToJson(const LinearModel &m) {
  return {{"kind", m.kind == LinearKind::kLogreg ? "logreg" : "svm"},
          {"num_classes", m.num_classes},
          {"num_features", m.num_features},
          {"weights", m.weights},
          {"bias", m.bias},
          {"class_names", m.class_names}};
}

LinearModel LinearFromJson(const json &j) {
  LinearModel m;
  const auto kind = Get<std::string>(j, "kind");
  if (kind != "logreg" && kind != "svm") throw SchemaError("model file: bad linear kind");
  m.kind = kind == "logreg" ? LinearKind::kLogreg : LinearKind::kSvm;
  m.num_classes = Get<int>(j, "num_classes");
  m.num_features = Get<int>(j, "num_features");
  m.weights = Get<std::vector<double>>(j, "weights");
  m.bias = Get<std::vector<double>>(j, "bias");
  m.class_names = Get<std::vector<std::string>>(j, "class_names");
  if (m.num_classes < 0 || m.num_features < 0 ||
      m.weights.size() != static_cast<size_t>(m.num_classes) * m.num_features ||
      m.bias.size() != static_cast<size_t>(m.num_classes)) {
    throw SchemaError("model file: linear model dimensions are inconsistent");
  }
  return m;
}

json ForestToJson(const ForestModel &m) {
  json trees = json::array();
  for (const DecisionTree &tree : m.trees) {
    json nodes = json::array();
    for (const TreeNode &n : tree.nodes) {
      if (n.is_leaf()) {
        nodes.push_back({{"histogram", n.histogram}});
      } else {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  return {{"trees", std::move(trees)},
          {"num_features", m.num_features},
          {"num_classes", m.num_classes},
          {"seed", m.seed},
          {"class_names", m.class_names}};
}

ForestModel ForestFromJson(const json &j) {
  ForestModel m;
  m.num_features = Get<int>(j, "num_features");
  m.num_classes = Get<int>(j, "num_classes");
  m.seed = Get<uint64_t>(j, "seed");
  m.class_names = Get<std::vector<std::string>>(j, "class_names");
  for (const json &jt : Get<json>(j, "trees")) {
    DecisionTree tree;
    for (const json &jn : jt) {
      TreeNode n;
      if (jn.contains("histogram")) {
        n.histogram = Get<std::vector<double>>(jn, "histogram");
        if (n.histogram.size() != static_cast<size_t>(m.num_classes)) {
          throw SchemaError("model file: leaf histogram has the wrong size");
        }
      } else {
        n.feature = Get<int>(jn, "feature");
        n.threshold = Get<double>(jn, "threshold");
        n.left = Get<int>(jn, "left");
        n.right = Get<int>(jn, "right");
      }
      tree.nodes.push_back(std::move(n));
    }
    const int size = static_cast<int>(tree.nodes.size());
    for (const TreeNode &n : tree.nodes) {
      if (!n.is_leaf() && (n.left <= 0 || n.left >= size || n.right <= 0 || n.right >= size ||
                           n.feature >= m.num_features)) {
        throw SchemaError("model file: tree node refers to a missing child or feature");
      }
    }
    if (tree.nodes.empty()) throw SchemaError("model file: empty tree");
    m.trees.push_back(std::move(tree));
  }
  return m;
}

json CrfToJson(const CrfModel &m) {
  return {{"label_names", m.label_names},
          {"feature_names", m.feature_names},
          {"emission", m.emission},
          {"transition", m.transition},
          {"l2", m.l2}};
}

CrfModel CrfFromJson(const json &j) {
  CrfModel m;
  m.label_names = Get<std::vector<std::string>>(j, "label_names");
  m.feature_names = Get<std::vector<std::string>>(j, "feature_names");
  m.emission = Get<std::vector<double>>(j, "emission");
  m.transition = Get<std::vector<double>>(j, "transition");
  m.l2 = Get<double>(j, "l2");
  const size_t L = m.label_names.size();
  if (L == 0 || m.emission.size() != m.feature_names.size() * L ||
      m.transition.size() != L * L) {
    throw SchemaError("model file: CRF dimensions are inconsistent");
  }
  try {
    m.RebuildIndex();
  } catch (const Error &e) {
    throw SchemaError(std::string("model file: ") + e.what());
  }
  return m;
}

json LabelsToJson(const std::vector<SpeechActLabel> &labels) {
  json out = json::array();
  for (const auto &l : labels) out.push_back(SpeechActToJson(l));
  return out;
}

json SpeechActPayload(const SpeechActModel &m) {
  json grams = json::array();
  for (const auto &g : m.vocab.grams()) grams.push_back(g);
  json p = {{"type", "speech_act"},
            {"system", SystemName(m.system)},
            {"labels", LabelsToJson(m.labels)},
            {"vocabulary", std::move(grams)},
            {"feature_config",
             {{"history_depth", m.feature_config.history_depth},
              {"include_speaker_change", m.feature_config.include_speaker_change}}},
            {"history_depth", m.history_depth}};
  if (!m.per_speaker.empty()) {
    json sub = json::object();
    for (const auto &[speaker, lm] : m.per_speaker) sub[SpeakerName(speaker)] = LinearToJson(lm);
    p["per_speaker"] = std::move(sub);
  }
  if (m.linear) p["linear"] = LinearToJson(*m.linear);
  if (m.forest) p["forest"] = ForestToJson(*m.forest);
  if (m.rules) p["rules"] = RulesetToJson(*m.rules);
  return p;
}

SpeechActModel SpeechActFromPayload(const json &p) {
  SpeechActModel m;
  try {
    m.system = ParseSystemId(Get<std::string>(p, "system"));
  } catch (const SchemaError &) {
    throw;
  } catch (const Error &e) {
    throw SchemaError(std::string("model file: ") + e.what());
  }
  for (const json &jl : Get<json>(p, "labels")) {
    m.labels.push_back({Get<std::string>(jl, "category"), Get<std::string>(jl, "attribute")});
  }
  std::vector<Vocabulary::Gram> grams;
  for (const json &g : Get<json>(p, "vocabulary")) grams.push_back(g.get<Vocabulary::Gram>());
  try {
    m.vocab = Vocabulary(std::move(grams));
  } catch (const Error &e) {
    throw SchemaError(std::string("model file: ") + e.what());
  }
  const json fc = Get<json>(p, "feature_config");
  m.feature_config.history_depth = Get<int>(fc, "history_depth");
  m.feature_config.include_speaker_change = Get<bool>(fc, "include_speaker_change");
  m.history_depth = Get<int>(p, "history_depth");
  if (p.contains("per_speaker")) {
    for (const auto &[name, jm] : p["per_speaker"].items()) {
      try {
        m.per_speaker.emplace(ParseSpeaker(name), LinearFromJson(jm));
      } catch (const SchemaError &) {
        throw;
      } catch (const Error &e) {
        throw SchemaError(std::string("model file: ") + e.what());
      }
    }
  }
  if (p.contains("linear")) m.linear = LinearFromJson(p["linear"]);
  if (p.contains("forest")) m.forest = ForestFromJson(p["forest"]);
  if (p.contains("rules")) m.rules = RulesetFromJson(p["rules"], "model file rules");

  const bool ok = [&] {
    switch (m.system) {
      case SystemId::kS1: return m.rules.has_value();
      case SystemId::kS2:
      case SystemId::kS4: return m.forest.has_value();
      case SystemId::kS3: return m.per_speaker.size() == 2;
      case SystemId::kS5: return m.linear.has_value();
    }
    return false;
  }();
  if (!ok) throw SchemaError("model file: submodels do not match system " + SystemName(m.system));
  return m;
}

json SemanticPayload(const SemanticModel &m) {
  json crfs = json::object();
  for (AttributeKind kind : kAllKinds) crfs[KindName(kind)] = CrfToJson(m.crf(kind));
  return {{"type", "semantic"}, {"crfs", std::move(crfs)}, {"ontology", OntologyToJson(m.ontology)}};
}

SemanticModel SemanticFromPayload(const json &p) {
  SemanticModel m;
  const json crfs = Get<json>(p, "crfs");
  for (AttributeKind kind : kAllKinds) {
    m.crfs[static_cast<int>(kind)] = CrfFromJson(Get<json>(crfs, KindName(kind)));
  }
  m.ontology = ParseOntology(Get<json>(p, "ontology").dump(), "model file ontology");
  return m;
}

}  // namespace

std::string SerializeModel(const AnyModel &model) {
  json payload = std::visit(
      [](const auto &m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SpeechActModel>) {
          return SpeechActPayload(m);
        } else {
          return SemanticPayload(m);
        }
      },
      model);
  const std::string body = payload.dump();
  json doc = {{"format", kModelFormat}, {"checksum", Fnv1a64(body)}, {"payload", std::move(payload)}};
  return doc.dump() + "\n";
}

AnyModel DeserializeModel(const std::string &text, const std::string &source) {
  const std::string prefix = source.empty() ? "model file" : source;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw SchemaError(prefix + ": corrupt model file: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("format") || !doc["format"].is_string()) {
    throw SchemaError(prefix + ": missing format version field");
  }
  const std::string format = doc["format"].get<std::string>();
  if (format != kModelFormat) {
    throw SchemaError(prefix + ": version mismatch: file has '" + format +
                      "', this build reads '" + kModelFormat + "'");
  }
  if (!doc.contains("payload") || !doc.contains("checksum") || !doc["checksum"].is_string()) {
    throw SchemaError(prefix + ": corrupt model file: missing payload or checksum");
  }
  const json &payload = doc["payload"];
  if (Fnv1a64(payload.dump()) != doc["checksum"].get<std::string>()) {
    throw SchemaError(prefix + ": corrupt model file: checksum mismatch");
  }
  try {
    const std::string type = Get<std::string>(payload, "type");
    if (type == "speech_act") return SpeechActFromPayload(payload);
    if (type == "semantic") return SemanticFromPayload(payload);
    throw SchemaError("model file: unknown model type '" + type + "'");
  } catch (const SchemaError &e) {
    throw SchemaError(prefix + ": " + e.what());
  }
}

void SaveModel(const AnyModel &model, const std::string &path) {
  WriteFileAtomic(path, SerializeModel(model));
}

AnyModel LoadModel(const std::string &path) { return DeserializeModel(ReadFile(path), path); }

}  // namespace slu
