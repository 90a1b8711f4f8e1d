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

#include "slu/features.h"

#include <algorithm>
#include <cctype>
#include <map>

#include "slu/common.h"

namespace slu {

namespace {

constexpr char kGramSeparator = '\x1f';

std::string GramKey(std::vector<std::string>::const_iterator begin, size_t n) {
  std::string key;
  for (size_t i = 0; i < n; ++i) {
    if (i > 0) key += kGramSeparator;
    key += begin[i];
  }
  return key;
}

std::vector<std::string> LowercaseTexts(const std::vector<Token> &tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token &t : tokens) out.push_back(Lowercase(t.text));
  return out;
}

// Last n UTF-8 code points of text.
std::string Utf8Suffix(const std::string &text, size_t n) {
  size_t pos = text.size();
  size_t count = 0;
  while (pos > 0 && count < n) {
    --pos;
    while (pos > 0 && (static_cast<unsigned char>(text[pos]) & 0xC0) == 0x80) --pos;
    ++count;
  }
  return text.substr(pos);
}

}  // namespace

std::string Lowercase(const std::string &text) {
  std::string out = text;
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<Gram> grams) : grams_(std::move(grams)) {
  for (size_t i = 0; i < grams_.size(); ++i) {
    const Gram &g = grams_[i];
    if (g.empty() || g.size() > 3) throw Error("vocabulary gram must have 1-3 tokens");
    if (!index_.emplace(GramKey(g.begin(), g.size()), static_cast<int>(i)).second) {
      throw Error("duplicate vocabulary gram");
    }
  }
}

int Vocabulary::Find(const Gram &gram) const { return Find(gram.begin(), gram.size()); }

int Vocabulary::Find(std::vector<std::string>::const_iterator begin,
                     size_t n) const {
  auto it = index_.find(GramKey(begin, n));
  return it == index_.end() ? -1 : it->second;
}

Vocabulary BuildNgramVocab(const Corpus &corpus, size_t max_size) {
  if (corpus.NumUtterances() == 0) throw Error("cannot build a vocabulary from an empty corpus");
  std::map<std::vector<std::string>, long> counts;
  for (const Dialog &dialog : corpus.dialogs) {
    for (const Utterance &u : dialog.utterances) {
      const auto words = LowercaseTexts(u.tokens);
      for (size_t n = 1; n <= 3; ++n) {
        for (size_t i = 0; i + n <= words.size(); ++i) {
          ++counts[std::vector<std::string>(words.begin() + i, words.begin() + i + n)];
        }
      }
    }
  }
  std::vector<std::pair<const std::vector<std::string> *, long>> ranked;
  ranked.reserve(counts.size());
  for (const auto &[gram, count] : counts) ranked.emplace_back(&gram, count);
  // std::map already orders grams lexicographically, so a stable sort on
  // (count desc, length asc) yields the full tie-break.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first->size() < b.first->size();
  });
  if (ranked.size() > max_size) ranked.resize(max_size);
  std::vector<Vocabulary::Gram> grams;
  grams.reserve(ranked.size());
  for (const auto &entry : ranked) grams.push_back(*entry.first);
  return Vocabulary(std::move(grams));
}

int SaFeatureDimension(const Vocabulary &vocab, const SaFeatureConfig &config) {
  return (config.history_depth + 1) * (static_cast<int>(vocab.size()) + 1);
}

SparseVector ExtractSaFeatures(const Dialog &dialog, int index,
                               const Vocabulary &vocab,
                               const SaFeatureConfig &config) {
  const int n = static_cast<int>(dialog.utterances.size());
  if (index < 0 || index >= n) {
    throw Error("utterance index " + std::to_string(index) + " out of range for dialog '" +
                dialog.id + "'");
  }
  if (config.history_depth < 0 || config.history_depth > 2) {
    throw Error("history depth must be 0, 1 or 2");
  }
  const int block = static_cast<int>(vocab.size()) + 1;
  SparseVector out;
  for (int offset = 0; offset <= config.history_depth; ++offset) {
    const int at = index - offset;
    if (at < 0) break;
    const Utterance &u = dialog.utterances[at];
    const auto words = LowercaseTexts(u.tokens);
    std::vector<int> columns;
    for (size_t len = 1; len <= 3; ++len) {
      for (size_t i = 0; i + len <= words.size(); ++i) {
        const int column = vocab.Find(words.begin() + i, len);
        if (column >= 0) columns.push_back(offset * block + column);
      }
    }
    if (config.include_speaker_change && at > 0 &&
        dialog.utterances[at - 1].speaker != u.speaker) {
      columns.push_back(offset * block + block - 1);
    }
    std::sort(columns.begin(), columns.end());
    columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
    for (int c : columns) out.entries.emplace_back(c, 1.0);
  }
  return out;
}

std::vector<double> DiscourseFeatures::ToDense() const {
  std::vector<double> dense(question_marks.begin(), question_marks.end());
  dense.push_back(speaker_change_prev ? 1.0 : 0.0);
  dense.push_back(speaker_change_prev2 ? 1.0 : 0.0);
  dense.push_back(speaker_is_guide ? 1.0 : 0.0);
  return dense;
}

DiscourseFeatures ExtractDiscourseFeatures(const Dialog &dialog, int index,
                                           int history_depth) {
  const int n = static_cast<int>(dialog.utterances.size());
  if (index < 0 || index >= n) {
    throw Error("utterance index " + std::to_string(index) + " out of range for dialog '" +
                dialog.id + "'");
  }
  if (history_depth < 1 || history_depth > 2) {
    throw Error("discourse history depth must be 1 or 2");
  }
  DiscourseFeatures f;
  for (int offset = 0; offset <= history_depth; ++offset) {
    const int at = index - offset;
    int count = 0;
    if (at >= 0) {
      for (const Token &t : dialog.utterances[at].tokens) count += t.text == "?";
    }
    f.question_marks.push_back(count);
  }
  const Speaker current = dialog.utterances[index].speaker;
  f.speaker_change_prev = index >= 1 && dialog.utterances[index - 1].speaker != current;
  f.speaker_change_prev2 = index >= 2 && dialog.utterances[index - 2].speaker != current;
  f.speaker_is_guide = current == Speaker::kGuide;
  return f;
}

std::vector<std::string> ExtractTokenFeatures(const std::vector<Token> &tokens,
                                              int position) {
  const int n = static_cast<int>(tokens.size());
  if (position < 0 || position >= n) {
    throw Error("token position " + std::to_string(position) + " out of range");
  }
  std::vector<std::string> features;
  features.reserve(7 * (2 * kTokenWindow + 1));
  for (int offset = -kTokenWindow; offset <= kTokenWindow; ++offset) {
    const std::string prefix = std::to_string(offset) + ":";
    const int at = position + offset;
    if (at < 0 || at >= n) {
      features.push_back(prefix + "pad");
      continue;
    }
    const Token &token = tokens[at];
    const std::string &text = token.text;
    const std::string lower = Lowercase(text);
    bool has_letter = false, all_upper = true, has_digit = false;
    for (unsigned char c : text) {
      if (std::isalpha(c)) {
        has_letter = true;
        if (!std::isupper(c)) all_upper = false;
      }
      if (std::isdigit(c)) has_digit = true;
    }
    const bool init_cap = std::isupper(static_cast<unsigned char>(text[0])) != 0;
    features.push_back(prefix + "lower=" + lower);
    features.push_back(prefix + "suf3=" + Utf8Suffix(lower, 3));
    features.push_back(prefix + "initcap=" + (init_cap ? "1" : "0"));
    features.push_back(prefix + "allcaps=" + (has_letter && all_upper ? "1" : "0"));
    features.push_back(prefix + "digit=" + (has_digit ? "1" : "0"));
    features.push_back(prefix + "posc=" + token.pos_coarse);
    features.push_back(prefix + "posf=" + token.pos_fine);
  }
  return features;
}

std::vector<std::vector<std::string>> ExtractSequenceFeatures(
    const std::vector<Token> &tokens) {
  std::vector<std::vector<std::string>> out;
  out.reserve(tokens.size());
  for (int t = 0; t < static_cast<int>(tokens.size()); ++t) {
    out.push_back(ExtractTokenFeatures(tokens, t));
  }
  return out;
}

}  // namespace slu
