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

// Serial reference vs OpenMP kernels on a generated corpus. Thread count
// follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <map>

#include "slu/crf.h"
#include "slu/features.h"
#include "slu/linear.h"
#include "slu/slu.h"
#include "slu/synthetic.h"

namespace {

struct CrfFixture {
  int num_features = 0;
  int num_labels = 0;
  std::vector<slu::EncodedSequence> data;
  std::vector<double> params;
};

const CrfFixture &Crf(int dialogs) {
  static std::map<int, CrfFixture> cache;
  auto it = cache.find(dialogs);
  if (it != cache.end()) return it->second;
  slu::SyntheticOptions options;
  options.num_dialogs = dialogs;
  const slu::Corpus corpus = slu::GenerateSyntheticCorpus(options);
  std::set<std::string> mains;
  for (const auto &[main, entry] : slu::SyntheticOntology()) mains.insert(main);
  const auto names = slu::BioLabelNames(mains);
  std::map<std::string, int> ids;
  for (size_t i = 0; i < names.size(); ++i) ids[names[i]] = static_cast<int>(i);
  std::vector<slu::CrfExample> examples;
  for (const auto &d : corpus.dialogs) {
    for (const auto &u : d.utterances) {
      slu::CrfExample ex;
      ex.features = slu::ExtractSequenceFeatures(u.tokens);
      for (const auto &l : slu::SegmentsToBio(u, slu::AttributeKind::kMain)) {
        ex.labels.push_back(ids.at(l));
      }
      examples.push_back(std::move(ex));
    }
  }
  slu::CrfTrainOptions train;
  train.max_iterations = 0;
  const slu::CrfModel model = slu::TrainCrf(examples, names, train);
  CrfFixture f;
  f.num_features = model.num_features();
  f.num_labels = model.num_labels();
  for (const auto &ex : examples) f.data.push_back(slu::Encode(model, ex));
  f.params.assign(model.num_params(), 0.01);
  return cache.emplace(dialogs, std::move(f)).first->second;
}

void BM_CrfObjectiveSerial(benchmark::State &state) {
  const CrfFixture &f = Crf(static_cast<int>(state.range(0)));
  std::vector<double> grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        slu::CrfObjectiveSerial(f.params, f.num_features, f.num_labels, f.data, 0.1, grad));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.data.size()));
}

void BM_CrfObjectiveParallel(benchmark::State &state) {
  const CrfFixture &f = Crf(static_cast<int>(state.range(0)));
  std::vector<double> grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        slu::CrfObjective(f.params, f.num_features, f.num_labels, f.data, 0.1, grad));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.data.size()));
}

struct LogregFixture {
  int num_classes = 0;
  int num_features = 0;
  std::vector<slu::LabeledVector> data;
  std::vector<double> params;
};

const LogregFixture &Logreg(int dialogs) {
  static std::map<int, LogregFixture> cache;
  auto it = cache.find(dialogs);
  if (it != cache.end()) return it->second;
  slu::SyntheticOptions options;
  options.num_dialogs = dialogs;
  const slu::Corpus corpus = slu::GenerateSyntheticCorpus(options);
  const slu::Vocabulary vocab = slu::BuildNgramVocab(corpus);
  const slu::SaFeatureConfig config;
  LogregFixture f;
  f.num_features = slu::SaFeatureDimension(vocab, config);
  std::map<slu::SpeechActLabel, int> labels;
  for (const auto &d : corpus.dialogs) {
    for (int i = 0; i < static_cast<int>(d.utterances.size()); ++i) {
      const auto &gold = d.utterances[i].speech_acts.front();
      const int y = labels.emplace(gold, static_cast<int>(labels.size())).first->second;
      f.data.push_back({slu::ExtractSaFeatures(d, i, vocab, config), y});
    }
  }
  f.num_classes = static_cast<int>(labels.size());
  f.params.assign(static_cast<size_t>(f.num_classes) * (f.num_features + 1), 0.01);
  return cache.emplace(dialogs, std::move(f)).first->second;
}

void BM_LogregObjectiveSerial(benchmark::State &state) {
  const LogregFixture &f = Logreg(static_cast<int>(state.range(0)));
  std::vector<double> grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(slu::LogregObjectiveSerial(f.params, f.data, f.num_classes,
                                                        f.num_features, 1.0, grad));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.data.size()));
}

void BM_LogregObjectiveParallel(benchmark::State &state) {
  const LogregFixture &f = Logreg(static_cast<int>(state.range(0)));
  std::vector<double> grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        slu::LogregObjective(f.params, f.data, f.num_classes, f.num_features, 1.0, grad));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.data.size()));
}

}  // namespace

BENCHMARK(BM_CrfObjectiveSerial)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrfObjectiveParallel)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogregObjectiveSerial)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogregObjectiveParallel)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
