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

#include "slu/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "slu/common.h"

namespace slu {

using nlohmann::json;

PrF1 Prf1(int64_t tp, int64_t fp, int64_t fn) {
  if (tp < 0 || fp < 0 || fn < 0) throw Error("counts must be non-negative");
  PrF1 s;
  s.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  s.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  s.f1 = F1FromPrecisionRecall(s.precision, s.recall);
  return s;
}

double F1FromPrecisionRecall(double precision, double recall) {
  const double sum = precision + recall;
  return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

namespace {

void CheckAligned(size_t gold, size_t pred, size_t speakers) {
  if (gold != pred || gold != speakers) {
    throw Error("gold, prediction and speaker sequences differ in length (" +
                std::to_string(gold) + ", " + std::to_string(pred) + ", " +
                std::to_string(speakers) + ")");
  }
}

void CheckCorporaAligned(const Corpus &gold, const Corpus &pred) {
  const size_t n = std::min(gold.dialogs.size(), pred.dialogs.size());
  for (size_t d = 0; d < n; ++d) {
    if (gold.dialogs[d].id != pred.dialogs[d].id) {
      throw Error("corpora are misaligned at dialog '" + gold.dialogs[d].id +
                  "' (prediction has '" + pred.dialogs[d].id + "')");
    }
    if (gold.dialogs[d].utterances.size() != pred.dialogs[d].utterances.size()) {
      throw Error("corpora are misaligned at dialog '" + gold.dialogs[d].id +
                  "': utterance counts differ");
    }
  }
  if (gold.dialogs.size() != pred.dialogs.size()) {
    const Corpus &longer = gold.dialogs.size() > n ? gold : pred;
    throw Error("corpora are misaligned at dialog '" + longer.dialogs[n].id +
                "': present in only one corpus");
  }
}

}  // namespace

EvalReport EvalSpeechActs(const std::vector<std::vector<SpeechActLabel>> &gold,
                          const std::vector<SpeechActLabel> &pred,
                          const std::vector<Speaker> &speakers) {
  CheckAligned(gold.size(), pred.size(), speakers.size());
  EvalReport report;
  for (size_t i = 0; i < gold.size(); ++i) {
    const std::set<SpeechActLabel> gold_set(gold[i].begin(), gold[i].end());
    Counts c;
    if (gold_set.count(pred[i])) {
      c.tp = 1;
      c.fn = static_cast<int64_t>(gold_set.size()) - 1;
    } else {
      c.fp = 1;
      c.fn = static_cast<int64_t>(gold_set.size());
    }
    report.Add(speakers[i], c);
  }
  return report;
}

EvalReport EvalSegments(const std::vector<std::vector<SemanticSegment>> &gold,
                        const std::vector<std::vector<SemanticSegment>> &pred,
                        const std::vector<Speaker> &speakers) {
  CheckAligned(gold.size(), pred.size(), speakers.size());
  EvalReport report;
  for (size_t i = 0; i < gold.size(); ++i) {
    std::multiset<SemanticSegment> unmatched(gold[i].begin(), gold[i].end());
    Counts c;
    for (const SemanticSegment &seg : pred[i]) {
      auto it = unmatched.find(seg);
      if (it != unmatched.end()) {
        ++c.tp;
        unmatched.erase(it);
      } else {
        ++c.fp;
      }
    }
    c.fn = static_cast<int64_t>(unmatched.size());
    report.Add(speakers[i], c);
  }
  return report;
}

EvalReport EvalSpeechActCorpora(const Corpus &gold, const Corpus &pred, bool category_only) {
  CheckCorporaAligned(gold, pred);
  std::vector<std::vector<SpeechActLabel>> gold_labels;
  std::vector<SpeechActLabel> pred_labels;
  std::vector<Speaker> speakers;
  for (size_t d = 0; d < gold.dialogs.size(); ++d) {
    for (size_t i = 0; i < gold.dialogs[d].utterances.size(); ++i) {
      const Utterance &g = gold.dialogs[d].utterances[i];
      const Utterance &p = pred.dialogs[d].utterances[i];
      if (p.speech_acts.size() != 1) {
        throw Error("prediction for dialog '" + gold.dialogs[d].id + "', utterance " +
                    std::to_string(i) + " must hold exactly one speech act");
      }
      std::vector<SpeechActLabel> gl = g.speech_acts;
      SpeechActLabel pl = p.speech_acts[0];
      if (category_only) {
        std::vector<SpeechActLabel> cats;
        for (auto l : gl) {
          l.attribute = kNoneAttribute;
          if (std::find(cats.begin(), cats.end(), l) == cats.end()) cats.push_back(l);
        }
        gl = std::move(cats);
        pl.attribute = kNoneAttribute;
      }
      gold_labels.push_back(std::move(gl));
      pred_labels.push_back(std::move(pl));
      speakers.push_back(g.speaker);
    }
  }
  return EvalSpeechActs(gold_labels, pred_labels, speakers);
}

EvalReport EvalSegmentCorpora(const Corpus &gold, const Corpus &pred) {
  CheckCorporaAligned(gold, pred);
  std::vector<std::vector<SemanticSegment>> g, p;
  std::vector<Speaker> speakers;
  for (size_t d = 0; d < gold.dialogs.size(); ++d) {
    for (size_t i = 0; i < gold.dialogs[d].utterances.size(); ++i) {
      g.push_back(gold.dialogs[d].utterances[i].segments);
      p.push_back(pred.dialogs[d].utterances[i].segments);
      speakers.push_back(gold.dialogs[d].utterances[i].speaker);
    }
  }
  return EvalSegments(g, p, speakers);
}

namespace {

double Round4(double x) { return std::round(x * 1e4) / 1e4; }

json CountsToJson(const Counts &c) {
  const PrF1 s = c.Scores();
  return {{"tp", c.tp},
          {"fp", c.fp},
          {"fn", c.fn},
          {"precision", Round4(s.precision)},
          {"recall", Round4(s.recall)},
          {"f1", Round4(s.f1)}};
}

}  // namespace

json ReportToJson(const std::vector<std::pair<std::string, EvalReport>> &rows) {
  json out = json::array();
  for (const auto &[name, r] : rows) {
    out.push_back({{"system", name},
                   {"GUIDE", CountsToJson(r.guide)},
                   {"TOURIST", CountsToJson(r.tourist)},
                   {"OVERALL", CountsToJson(r.overall)}});
  }
  return {{"columns", {"precision", "recall", "f1"}}, {"rows", std::move(out)}};
}

std::string FormatReportTable(const std::vector<std::pair<std::string, EvalReport>> &rows) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s | %-26s | %-26s | %-26s\n", "System", "Guide",
                "Tourist", "Overall");
  out << line;
  std::snprintf(line, sizeof(line), "%-10s | %8s %8s %8s | %8s %8s %8s | %8s %8s %8s\n", "",
                "P", "R", "F1", "P", "R", "F1", "P", "R", "F1");
  out << line;
  for (const auto &[name, r] : rows) {
    const PrF1 g = r.guide.Scores(), t = r.tourist.Scores(), o = r.overall.Scores();
    std::snprintf(line, sizeof(line),
                  "%-10s | %8.4f %8.4f %8.4f | %8.4f %8.4f %8.4f | %8.4f %8.4f %8.4f\n",
                  name.c_str(), g.precision, g.recall, g.f1, t.precision, t.recall, t.f1,
                  o.precision, o.recall, o.f1);
    out << line;
  }
  return out.str();
}

std::vector<std::map<std::string, double>> Grid::Points() const {
  std::vector<std::map<std::string, double>> points{{}};
  for (const auto &[name, values] : lists) {
    if (values.empty()) throw Error("grid list '" + name + "' is empty");
    std::vector<std::map<std::string, double>> next;
    for (const auto &p : points) {
      for (double v : values) {
        auto q = p;
        q[name] = v;
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

Grid DefaultGrid(Task task, SystemId system) {
  Grid grid;
  grid.task = task;
  grid.system = system;
  if (task == Task::kSemantic) {
    grid.lists = {{"l2", {0.01, 0.1, 1}}};
    return grid;
  }
  switch (system) {
    case SystemId::kS3: grid.lists = {{"c", {0.01, 0.1, 1, 10, 100}}}; break;
    case SystemId::kS5: grid.lists = {{"l2", {0.01, 0.1, 1, 10}}}; break;
    case SystemId::kS2:
    case SystemId::kS4: grid.lists = {{"num_trees", {100}}}; break;
    case SystemId::kS1: break;
  }
  return grid;
}

void ApplyHyperparam(SpeechActHyperparams &hp, const std::string &name, double value) {
  if (name == "c") {
    hp.svm_c = value;
  } else if (name == "l2") {
    hp.logreg_l2 = value;
  } else if (name == "num_trees") {
    hp.forest.num_trees = static_cast<int>(value);
  } else if (name == "max_depth") {
    hp.forest.max_depth = static_cast<int>(value);
  } else if (name == "min_leaf") {
    hp.forest.min_leaf = static_cast<int>(value);
  } else if (name == "features_per_split") {
    hp.forest.features_per_split = static_cast<int>(value);
  } else if (name == "vocab_size") {
    hp.vocab_size = static_cast<size_t>(value);
  } else if (name == "max_epochs") {
    hp.max_epochs = static_cast<int>(value);
  } else if (name == "tolerance") {
    hp.tolerance = value;
  } else {
    throw Error("unknown speech-act hyperparameter '" + name + "'");
  }
}

void ApplyHyperparam(SemanticHyperparams &hp, const std::string &name, double value) {
  if (name == "l2") {
    hp.l2 = value;
  } else if (name == "max_iterations") {
    hp.max_iterations = static_cast<int>(value);
  } else if (name == "tolerance") {
    hp.tolerance = value;
  } else {
    throw Error("unknown semantic hyperparameter '" + name + "'");
  }
}

namespace {

double FoldF1(const Corpus &corpus, const std::map<std::string, int> &folds, int fold,
              const Grid &grid, const CvContext &ctx,
              const std::map<std::string, double> &point) {
  auto [train, test] = PartitionFold(corpus, folds, fold);
  Corpus pred = test;
  if (grid.task == Task::kSemantic) {
    if (!ctx.ontology) throw Error("semantic cross-validation needs an ontology");
    SemanticHyperparams hp = ctx.semantic;
    for (const auto &[name, value] : point) ApplyHyperparam(hp, name, value);
    const SemanticModel model = TrainSemanticTagger(train, *ctx.ontology, hp);
    for (Dialog &d : pred.dialogs) {
      for (Utterance &u : d.utterances) u.segments = PredictSegments(model, u);
    }
    return EvalSegmentCorpora(test, pred).overall.Scores().f1;
  }
  SpeechActHyperparams hp = ctx.speech_act;
  for (const auto &[name, value] : point) ApplyHyperparam(hp, name, value);
  const SpeechActModel model = TrainSpeechActSystem(train, grid.system, hp, grid.seed, ctx.rules);
  for (Dialog &d : pred.dialogs) {
    const auto labels = PredictSpeechActs(model, d);
    for (size_t i = 0; i < labels.size(); ++i) d.utterances[i].speech_acts = {labels[i]};
  }
  const bool category_only = ctx.forest_category_only &&
                             (grid.system == SystemId::kS2 || grid.system == SystemId::kS4);
  return EvalSpeechActCorpora(test, pred, category_only).overall.Scores().f1;
}

}  // namespace

CvResult GridSearchCv(const Corpus &corpus, const Grid &grid, const CvContext &context) {
  CvResult result;
  result.folds = SplitFolds(corpus, grid.folds, grid.seed);
  const auto points = grid.Points();
  const int k = grid.folds;
  const long tasks = static_cast<long>(points.size()) * k;
  std::vector<double> f1(tasks, 0.0);
  std::vector<std::string> errors(tasks);

  // Grid points and folds are independent; results land in fixed slots.
#pragma omp parallel for schedule(dynamic)
  for (long task = 0; task < tasks; ++task) {
    try {
      f1[task] = FoldF1(corpus, result.folds, static_cast<int>(task % k), grid, context,
                        points[task / k]);
    } catch (const std::exception &e) {
      errors[task] = e.what();
    }
  }
  for (const std::string &e : errors) {
    if (!e.empty()) throw Error(e);
  }

  for (size_t p = 0; p < points.size(); ++p) {
    GridPointResult row;
    row.point = points[p];
    double sum = 0.0;
    for (int f = 0; f < k; ++f) {
      row.fold_f1.push_back(f1[p * k + f]);
      sum += f1[p * k + f];
    }
    row.mean_f1 = sum / k;
    result.table.push_back(std::move(row));
    if (result.table[p].mean_f1 > result.table[result.best].mean_f1) result.best = p;
  }
  return result;
}

json CvResultToJson(const CvResult &result) {
  json table = json::array();
  for (const auto &row : result.table) {
    table.push_back({{"hyperparams", row.point}, {"fold_f1", row.fold_f1}, {"mean_f1", row.mean_f1}});
  }
  return {{"table", std::move(table)},
          {"best", result.table.empty() ? json() : json(result.table[result.best].point)},
          {"best_index", result.best},
          {"best_mean_f1", result.table.empty() ? 0.0 : result.table[result.best].mean_f1}};
}

}  // namespace slu
