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

#include "slu/corpus.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "slu/common.h"

namespace slu {

using nlohmann::json;

const char *SpeakerName(Speaker speaker) {
  return speaker == Speaker::kGuide ? "GUIDE" : "TOURIST";
}

Speaker ParseSpeaker(const std::string &name) {
  if (name == "GUIDE") return Speaker::kGuide;
  if (name == "TOURIST") return Speaker::kTourist;
  throw SchemaError("unknown speaker '" + name + "'");
}

const char *KindName(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::kMain: return "MAIN";
    case AttributeKind::kSub: return "SUB";
    case AttributeKind::kRel: return "REL";
    case AttributeKind::kFromTo: return "FROM_TO";
  }
  return "?";
}

size_t Corpus::NumUtterances() const {
  size_t n = 0;
  for (const auto &dialog : dialogs) n += dialog.utterances.size();
  return n;
}

std::optional<std::string> SegmentValue(const SemanticSegment &segment,
                                        AttributeKind kind) {
  switch (kind) {
    case AttributeKind::kMain: return segment.main;
    case AttributeKind::kSub: return segment.sub;
    case AttributeKind::kRel: return segment.rel;
    case AttributeKind::kFromTo: return segment.from_to;
  }
  return std::nullopt;
}

const std::set<std::string> *AdmissibleValues(const Ontology &ontology,
                                              const std::string &main,
                                              AttributeKind kind) {
  auto it = ontology.find(main);
  if (it == ontology.end()) return nullptr;
  switch (kind) {
    case AttributeKind::kSub: return &it->second.subcategories;
    case AttributeKind::kRel: return &it->second.relative_modifiers;
    case AttributeKind::kFromTo: return &it->second.from_to_modifiers;
    case AttributeKind::kMain: break;
  }
  return nullptr;
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError(path + ": read failed");
  return buffer.str();
}

void WriteFileAtomic(const std::string &path, const std::string &text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << text;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError(path + ": write failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError(path + ": rename failed");
  }
}

namespace {

// Location prefix for schema diagnostics.
std::string Where(const std::string &source, const std::string &dialog,
                  int utterance = -1) {
  std::string where = source.empty() ? "" : source + ": ";
  where += "dialog '" + dialog + "'";
  if (utterance >= 0) where += ", utterance " + std::to_string(utterance);
  return where;
}

std::string RequireString(const json &obj, const char *field,
                          const std::string &where) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_string()) {
    throw SchemaError(where + ": field '" + field + "' missing or not a string");
  }
  return it->get<std::string>();
}

std::optional<std::string> OptionalString(const json &obj, const char *field,
                                          const std::string &where) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw SchemaError(where + ": field '" + field + "' is not a string");
  }
  std::string value = it->get<std::string>();
  if (value.empty()) return std::nullopt;
  return value;
}

const json &OptionalArray(const json &obj, const char *field,
                          const std::string &where) {
  static const json kEmpty = json::array();
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return kEmpty;
  if (!it->is_array()) {
    throw SchemaError(where + ": field '" + field + "' is not a list");
  }
  return *it;
}

int RequireInt(const json &obj, const char *field, const std::string &where) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_number_integer()) {
    throw SchemaError(where + ": field '" + field +
                      "' missing or not an integer");
  }
  return it->get<int>();
}

}  // namespace

Corpus ParseCorpus(const json &doc, const std::string &source) {
  const std::string prefix = source.empty() ? "" : source + ": ";
  if (!doc.is_object() || !doc.contains("dialogs") ||
      !doc["dialogs"].is_array()) {
    throw SchemaError(prefix + "top-level field 'dialogs' missing or not a list");
  }
  Corpus corpus;
  for (const json &jd : doc["dialogs"]) {
    if (!jd.is_object()) throw SchemaError(prefix + "dialog is not an object");
    Dialog dialog;
    dialog.id = RequireString(jd, "id", prefix + "dialog");
    const json &utterances = OptionalArray(jd, "utterances", Where(source, dialog.id));
    for (size_t i = 0; i < utterances.size(); ++i) {
      const json &ju = utterances[i];
      const std::string where = Where(source, dialog.id, static_cast<int>(i));
      if (!ju.is_object()) throw SchemaError(where + ": not an object");
      Utterance u;
      u.index = static_cast<int>(i);
      if (ju.contains("index")) {
        if (RequireInt(ju, "index", where) != u.index) {
          throw SchemaError(where + ": field 'index' is not contiguous");
        }
      }
      const std::string speaker = RequireString(ju, "speaker", where);
      if (speaker != "GUIDE" && speaker != "TOURIST") {
        throw SchemaError(where + ": field 'speaker' must be GUIDE or TOURIST, got '" +
                          speaker + "'");
      }
      u.speaker = ParseSpeaker(speaker);
      for (const json &jt : OptionalArray(ju, "tokens", where)) {
        if (!jt.is_object()) throw SchemaError(where + ": token is not an object");
        Token token;
        token.text = RequireString(jt, "text", where);
        token.pos_coarse = OptionalString(jt, "pos_coarse", where).value_or("");
        token.pos_fine = OptionalString(jt, "pos_fine", where).value_or("");
        u.tokens.push_back(std::move(token));
      }
      for (const json &ja : OptionalArray(ju, "speech_acts", where)) {
        if (!ja.is_object()) {
          throw SchemaError(where + ": speech act is not an object");
        }
        SpeechActLabel label;
        label.category = RequireString(ja, "category", where);
        label.attribute =
            OptionalString(ja, "attribute", where).value_or(kNoneAttribute);
        u.speech_acts.push_back(std::move(label));
      }
      for (const json &js : OptionalArray(ju, "segments", where)) {
        if (!js.is_object()) {
          throw SchemaError(where + ": segment is not an object");
        }
        SemanticSegment seg;
        seg.start = RequireInt(js, "start", where);
        seg.end = RequireInt(js, "end", where);
        seg.main = RequireString(js, "main", where);
        seg.sub = OptionalString(js, "sub", where);
        seg.rel = OptionalString(js, "rel", where);
        seg.from_to = OptionalString(js, "from_to", where);
        u.segments.push_back(std::move(seg));
      }
      dialog.utterances.push_back(std::move(u));
    }
    corpus.dialogs.push_back(std::move(dialog));
  }
  ValidateCorpus(corpus, source);
  return corpus;
}

void ValidateCorpus(const Corpus &corpus, const std::string &source) {
  std::unordered_set<std::string> ids;
  for (const Dialog &dialog : corpus.dialogs) {
    if (!ids.insert(dialog.id).second) {
      throw SchemaError((source.empty() ? "" : source + ": ") +
                        "duplicate dialog id '" + dialog.id + "'");
    }
    for (size_t i = 0; i < dialog.utterances.size(); ++i) {
      const Utterance &u = dialog.utterances[i];
      const std::string where = Where(source, dialog.id, static_cast<int>(i));
      if (u.index != static_cast<int>(i)) {
        throw SchemaError(where + ": field 'index' is not contiguous");
      }
      for (const Token &t : u.tokens) {
        if (t.text.empty()) throw SchemaError(where + ": field 'text' is empty");
      }
      if (u.speech_acts.size() > 4) {
        throw SchemaError(where + ": field 'speech_acts' has more than 4 labels");
      }
      std::set<SpeechActLabel> seen;
      for (const SpeechActLabel &label : u.speech_acts) {
        if (label.category.empty()) {
          throw SchemaError(where + ": field 'category' is empty");
        }
        if (!seen.insert(label).second) {
          throw SchemaError(where + ": field 'speech_acts' repeats " +
                            label.ToString());
        }
      }
      const int n = static_cast<int>(u.tokens.size());
      for (size_t s = 0; s < u.segments.size(); ++s) {
        const SemanticSegment &seg = u.segments[s];
        const std::string name = "segment " + std::to_string(s) + " (" +
                                 std::to_string(seg.start) + "," +
                                 std::to_string(seg.end) + "," + seg.main + ")";
        if (seg.end <= seg.start) {
          throw SchemaError(where + ": " + name + ": field 'end' must exceed 'start'");
        }
        if (seg.start < 0 || seg.end > n) {
          throw SchemaError(where + ": " + name + ": span outside the token range");
        }
        if (seg.main.empty()) {
          throw SchemaError(where + ": " + name + ": field 'main' is empty");
        }
      }
      // Same-kind spans must be disjoint.
      for (AttributeKind kind : kAllKinds) {
        std::vector<int> cover(n, -1);
        for (size_t s = 0; s < u.segments.size(); ++s) {
          const SemanticSegment &seg = u.segments[s];
          if (!SegmentValue(seg, kind)) continue;
          for (int t = seg.start; t < seg.end; ++t) {
            if (cover[t] >= 0) {
              throw SchemaError(where + ": segment " + std::to_string(s) +
                                " overlaps segment " + std::to_string(cover[t]) +
                                " in kind " + KindName(kind));
            }
            cover[t] = static_cast<int>(s);
          }
        }
      }
    }
  }
}

Corpus LoadCorpus(const std::string &path) {
  const std::string text = ReadFile(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw SchemaError(path + ": " + e.what());
  }
  return ParseCorpus(doc, path);
}

Ontology ParseOntology(const std::string &text, const std::string &source) {
  const std::string prefix = source.empty() ? "" : source + ": ";
  std::set<std::string> keys;
  std::string duplicate;
  json doc;
  try {
    doc = json::parse(text, [&](int depth, json::parse_event_t event,
                                json &parsed) {
      if (event == json::parse_event_t::key && depth == 1) {
        const std::string key = parsed.get<std::string>();
        if (!keys.insert(key).second && duplicate.empty()) duplicate = key;
      }
      return true;
    });
  } catch (const json::parse_error &e) {
    throw SchemaError(prefix + e.what());
  }
  if (!duplicate.empty()) {
    throw SchemaError(prefix + "duplicate main category '" + duplicate + "'");
  }
  if (!doc.is_object()) throw SchemaError(prefix + "ontology is not a mapping");
  Ontology ontology;
  for (const auto &[main, entry] : doc.items()) {
    if (main.empty()) throw SchemaError(prefix + "empty main category key");
    if (!entry.is_object()) {
      throw SchemaError(prefix + "entry for '" + main + "' is not a mapping");
    }
    OntologyEntry record;
    auto read = [&](const char *field, std::set<std::string> &out) {
      const json &values = OptionalArray(entry, field, prefix + "'" + main + "'");
      for (const json &v : values) {
        if (!v.is_string()) {
          throw SchemaError(prefix + "'" + main + "': field '" + field +
                            "' holds a non-string");
        }
        out.insert(v.get<std::string>());
      }
    };
    read("subcategories", record.subcategories);
    read("relative_modifiers", record.relative_modifiers);
    read("from_to_modifiers", record.from_to_modifiers);
    ontology.emplace(main, std::move(record));
  }
  return ontology;
}

Ontology LoadOntology(const std::string &path) {
  return ParseOntology(ReadFile(path), path);
}

json SpeechActToJson(const SpeechActLabel &label) {
  return {{"category", label.category}, {"attribute", label.attribute}};
}

json SegmentToJson(const SemanticSegment &segment) {
  json js = {{"start", segment.start}, {"end", segment.end}, {"main", segment.main}};
  if (segment.sub) js["sub"] = *segment.sub;
  if (segment.rel) js["rel"] = *segment.rel;
  if (segment.from_to) js["from_to"] = *segment.from_to;
  return js;
}

json CorpusToJson(const Corpus &corpus) {
  json dialogs = json::array();
  for (const Dialog &dialog : corpus.dialogs) {
    json utterances = json::array();
    for (const Utterance &u : dialog.utterances) {
      json tokens = json::array();
      for (const Token &t : u.tokens) {
        tokens.push_back({{"text", t.text},
                          {"pos_coarse", t.pos_coarse},
                          {"pos_fine", t.pos_fine}});
      }
      json acts = json::array();
      for (const auto &label : u.speech_acts) acts.push_back(SpeechActToJson(label));
      json segments = json::array();
      for (const auto &seg : u.segments) segments.push_back(SegmentToJson(seg));
      utterances.push_back({{"speaker", SpeakerName(u.speaker)},
                            {"tokens", std::move(tokens)},
                            {"speech_acts", std::move(acts)},
                            {"segments", std::move(segments)}});
    }
    dialogs.push_back({{"id", dialog.id}, {"utterances", std::move(utterances)}});
  }
  return {{"dialogs", std::move(dialogs)}};
}

json OntologyToJson(const Ontology &ontology) {
  json doc = json::object();
  for (const auto &[main, entry] : ontology) {
    doc[main] = {{"subcategories", entry.subcategories},
                 {"relative_modifiers", entry.relative_modifiers},
                 {"from_to_modifiers", entry.from_to_modifiers}};
  }
  return doc;
}

std::vector<std::string> SegmentsToBio(const Utterance &utterance,
                                       AttributeKind kind) {
  std::vector<std::string> labels(utterance.tokens.size(), "O");
  for (const SemanticSegment &seg : utterance.segments) {
    auto value = SegmentValue(seg, kind);
    if (!value) continue;
    labels[seg.start] = "B-" + *value;
    for (int t = seg.start + 1; t < seg.end; ++t) labels[t] = "I-" + *value;
  }
  return labels;
}

std::vector<Span> BioToSpans(const std::vector<std::string> &labels) {
  std::vector<Span> spans;
  bool open = false;
  for (size_t t = 0; t < labels.size(); ++t) {
    const std::string &label = labels[t];
    const bool is_begin = label.rfind("B-", 0) == 0;
    const bool is_inside = label.rfind("I-", 0) == 0;
    if (!is_begin && !is_inside) {
      open = false;
      continue;
    }
    std::string value = label.substr(2);
    if (is_inside && open && spans.back().value == value) {
      spans.back().end = static_cast<int>(t) + 1;
      continue;
    }
    spans.push_back({static_cast<int>(t), static_cast<int>(t) + 1, std::move(value)});
    open = true;
  }
  return spans;
}

std::map<std::string, int> SplitFolds(const Corpus &corpus, int k,
                                      uint64_t seed) {
  if (k < 2) throw Error("fold count must be at least 2, got " + std::to_string(k));
  if (corpus.dialogs.size() < static_cast<size_t>(k)) {
    throw Error("cannot split " + std::to_string(corpus.dialogs.size()) +
                " dialogs into " + std::to_string(k) + " folds");
  }
  std::vector<std::string> ids;
  for (const Dialog &d : corpus.dialogs) ids.push_back(d.id);
  std::sort(ids.begin(), ids.end());
  Rng rng(seed);
  for (size_t i = ids.size() - 1; i > 0; --i) {
    std::swap(ids[i], ids[UniformIndex(rng, i + 1)]);
  }
  std::map<std::string, int> folds;
  for (size_t i = 0; i < ids.size(); ++i) folds[ids[i]] = static_cast<int>(i % k);
  return folds;
}

std::pair<Corpus, Corpus> PartitionFold(const Corpus &corpus,
                                        const std::map<std::string, int> &folds,
                                        int fold) {
  Corpus train, test;
  for (const Dialog &d : corpus.dialogs) {
    auto it = folds.find(d.id);
    if (it == folds.end()) throw Error("dialog '" + d.id + "' has no fold");
    (it->second == fold ? test : train).dialogs.push_back(d);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace slu
