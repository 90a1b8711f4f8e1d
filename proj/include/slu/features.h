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

#ifndef SLU_FEATURES_H_
#define SLU_FEATURES_H_

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "slu/corpus.h"

namespace slu {

// Sparse real vector with strictly increasing indices and no stored zeros.
struct SparseVector {
  std::vector<std::pair<int, double>> entries;

  bool empty() const { return entries.empty(); }
  bool operator==(const SparseVector &) const = default;
};

// Dense column indices for the most frequent word 1-, 2- and 3-grams.
class Vocabulary {
 public:
  using Gram = std::vector<std::string>;

  Vocabulary() = default;
  // grams in column order; must be distinct
  explicit Vocabulary(std::vector<Gram> grams);

  size_t size() const { return grams_.size(); }
  const std::vector<Gram> &grams() const { return grams_; }
  // Column of a gram, or -1.
  int Find(const Gram &gram) const;
  int Find(std::vector<std::string>::const_iterator begin, size_t n) const;

 private:
  std::vector<Gram> grams_;
  std::unordered_map<std::string, int> index_;
};

struct SaFeatureConfig {
  int history_depth = 1;  // 0, 1 or 2 previous utterances
  bool include_speaker_change = true;
};

struct DiscourseFeatures {
  std::vector<int> question_marks;  // one count per history offset 0..depth
  bool speaker_change_prev = false;
  bool speaker_change_prev2 = false;
  bool speaker_is_guide = false;

  // [qm(0) .. qm(depth), change_prev, change_prev2, is_guide]
  std::vector<double> ToDense() const;
};

// ASCII lowercasing; bytes >= 0x80 pass through.
std::string Lowercase(const std::string &text);

// Pools all 1/2/3-gram counts over lowercased tokens of every utterance and
// keeps the max_size most frequent. Ties: shorter gram first, then
// lexicographic token order. Throws Error on an empty corpus.
Vocabulary BuildNgramVocab(const Corpus &corpus, size_t max_size = 5000);

// Binary n-gram presence per history offset plus a speaker-change bit.
// Block o occupies columns [o*(V+1), (o+1)*(V+1)); its last column is the
// speaker-change bit of utterance index-o.
SparseVector ExtractSaFeatures(const Dialog &dialog, int index,
                               const Vocabulary &vocab,
                               const SaFeatureConfig &config);
int SaFeatureDimension(const Vocabulary &vocab, const SaFeatureConfig &config);

DiscourseFeatures ExtractDiscourseFeatures(const Dialog &dialog, int index,
                                           int history_depth);

inline constexpr int kTokenWindow = 3;

// Namespaced feature strings for the token at position, over offsets -3..+3.
// These spellings are part of the serialized CRF model format.
std::vector<std::string> ExtractTokenFeatures(const std::vector<Token> &tokens,
                                              int position);

// ExtractTokenFeatures for every position.
std::vector<std::vector<std::string>> ExtractSequenceFeatures(
    const std::vector<Token> &tokens);

}  // namespace slu

#endif  // SLU_FEATURES_H_
