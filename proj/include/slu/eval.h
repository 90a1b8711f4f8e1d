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

#ifndef SLU_EVAL_H_
#define SLU_EVAL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "slu/corpus.h"
#include "slu/slu.h"

namespace slu {

struct PrF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// 0/0 is taken as 0 in every ratio.
PrF1 Prf1(int64_t tp, int64_t fp, int64_t fn);
// Harmonic mean of a published precision/recall pair; 0 when both are 0.
double F1FromPrecisionRecall(double precision, double recall);

struct Counts {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;

  Counts &operator+=(const Counts &o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  PrF1 Scores() const { return Prf1(tp, fp, fn); }
};

struct EvalReport {
  Counts guide;
  Counts tourist;
  Counts overall;

  Counts &For(Speaker s) { return s == Speaker::kGuide ? guide : tourist; }
  void Add(Speaker s, const Counts &c) {
    For(s) += c;
    overall += c;
  }
};

// Micro counts over (category, attribute) pairs per utterance.
EvalReport EvalSpeechActs(const std::vector<std::vector<SpeechActLabel>> &gold,
                          const std::vector<SpeechActLabel> &pred,
                          const std::vector<Speaker> &speakers);

// Exact match on (start, end, main, sub, rel, from_to).
EvalReport EvalSegments(const std::vector<std::vector<SemanticSegment>> &gold,
                        const std::vector<std::vector<SemanticSegment>> &pred,
                        const std::vector<Speaker> &speakers);

// Corpus-level scoring; the corpora must list the same dialogs and utterance
// counts in the same order. category_only compares categories alone.
EvalReport EvalSpeechActCorpora(const Corpus &gold, const Corpus &pred,
                                bool category_only = false);
EvalReport EvalSegmentCorpora(const Corpus &gold, const Corpus &pred);

// Rows of (system name, report) rendered in the published table layout:
// speaker x {precision, recall, f1}, four decimals.
std::string FormatReportTable(const std::vector<std::pair<std::string, EvalReport>> &rows);
nlohmann::json ReportToJson(const std::vector<std::pair<std::string, EvalReport>> &rows);

enum class Task { kSpeechAct, kSemantic };

// Hyperparameter grid. Points enumerate the cartesian product of the lists
// in declaration order, last list varying fastest.
struct Grid {
  Task task = Task::kSpeechAct;
  SystemId system = SystemId::kS5;
  std::vector<std::pair<std::string, std::vector<double>>> lists;
  int folds = 5;
  uint64_t seed = 0;

  std::vector<std::map<std::string, double>> Points() const;
};

// Defaults: S3 c in {0.01, 0.1, 1, 10, 100}; S5 l2 in {0.01, 0.1, 1, 10};
// semantic l2 in {0.01, 0.1, 1}; forests num_trees in {100}; S1 one empty point.
Grid DefaultGrid(Task task, SystemId system);

// Named overrides: "c", "l2", "num_trees", "max_depth", "min_leaf",
// "features_per_split", "vocab_size", "max_epochs", "max_iterations".
void ApplyHyperparam(SpeechActHyperparams &hp, const std::string &name, double value);
void ApplyHyperparam(SemanticHyperparams &hp, const std::string &name, double value);

struct CvContext {
  SpeechActHyperparams speech_act;
  SemanticHyperparams semantic;
  const Ontology *ontology = nullptr;  // semantic task
  const RuleSet *rules = nullptr;      // S1
  // Forest systems are scored on categories, as they never predict attributes.
  bool forest_category_only = true;
};

struct GridPointResult {
  std::map<std::string, double> point;
  std::vector<double> fold_f1;
  double mean_f1 = 0.0;
};

struct CvResult {
  std::vector<GridPointResult> table;
  size_t best = 0;
  std::map<std::string, int> folds;  // dialog id -> fold
};

// k-fold CV at dialog granularity for every grid point; best is the highest
// mean overall F1, earliest point on ties. Throws when there are fewer
// dialogs than folds.
CvResult GridSearchCv(const Corpus &corpus, const Grid &grid, const CvContext &context);
nlohmann::json CvResultToJson(const CvResult &result);

}  // namespace slu

#endif  // SLU_EVAL_H_
