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

#ifndef SLU_CRF_H_
#define SLU_CRF_H_

#include <string>
#include <unordered_map>
#include <vector>

#include "slu/optimize.h"

namespace slu {

// First-order linear-chain CRF with binary emission features and
// label-bigram transitions. There are no start/stop weights.
struct CrfModel {
  std::vector<std::string> label_names;    // L
  std::vector<std::string> feature_names;  // F, in index order
  std::vector<double> emission;            // F x L, row-major
  std::vector<double> transition;          // L x L, [from * L + to]
  double l2 = 0.0;

  int num_labels() const { return static_cast<int>(label_names.size()); }
  int num_features() const { return static_cast<int>(feature_names.size()); }
  size_t num_params() const { return emission.size() + transition.size(); }

  // -1 for a feature the model has never seen.
  int FeatureId(const std::string &name) const;
  // Must be called after feature_names changes.
  void RebuildIndex();

  bool operator==(const CrfModel &other) const;

 private:
  std::unordered_map<std::string, int> feature_index_;
};

// Log-potentials of one sequence.
struct Lattice {
  int length = 0;
  int num_labels = 0;
  std::vector<double> emission;    // T x L
  std::vector<double> transition;  // L x L

  double Emission(int t, int y) const {
    return emission[static_cast<size_t>(t) * num_labels + y];
  }
  double Transition(int from, int to) const {
    return transition[static_cast<size_t>(from) * num_labels + to];
  }
};

struct Marginals {
  double log_partition = 0.0;
  std::vector<double> unary;     // T x L
  std::vector<double> pairwise;  // (T-1) x L x L, [t][from][to]
};

struct Decoding {
  std::vector<int> labels;
  double score = 0.0;
};

using FeatureSets = std::vector<std::vector<std::string>>;

// Emission(t, y) sums the weights of the features present at t; unknown
// features contribute nothing. Throws on an empty sequence.
Lattice BuildLattice(const CrfModel &model, const FeatureSets &features);

// Exact log-space inference. Throws on non-finite scores.
Marginals ForwardBackward(const Lattice &lattice);

// Max-score path. Among equal-score paths the one with the lowest label at
// the last position wins, then the lowest predecessor at each step back.
Decoding Viterbi(const Lattice &lattice);

// Score of one path, accumulated left to right as
// e[0] (+ transition + e[t]) for t = 1..T-1.
double PathScore(const Lattice &lattice, const std::vector<int> &labels);

struct CrfExample {
  FeatureSets features;
  std::vector<int> labels;
};

// Sequence with features resolved to model indices (unknowns dropped).
struct EncodedSequence {
  std::vector<std::vector<int>> features;
  std::vector<int> labels;
};

EncodedSequence Encode(const CrfModel &model, const CrfExample &example);

struct NllResult {
  double value = 0.0;
  std::vector<double> gradient;  // [emission..., transition...]
};

// sum over the batch of (log Z - gold score) + (l2/2) ||weights||^2, added
// once per call, and its gradient. Throws on a gold label out of range.
NllResult NllAndGradient(const CrfModel &model, const std::vector<CrfExample> &batch,
                         double l2);

// Kernels over a flat parameter vector [emission F x L, transition L x L].
// The parallel kernel computes marginals per sequence, then accumulates
// each label column in sequence order, matching the serial reference bit for
// bit.
double CrfObjective(const std::vector<double> &params, int num_features,
                    int num_labels, const std::vector<EncodedSequence> &data,
                    double l2, std::vector<double> &grad);
double CrfObjectiveSerial(const std::vector<double> &params, int num_features,
                          int num_labels, const std::vector<EncodedSequence> &data,
                          double l2, std::vector<double> &grad);

struct CrfTrainOptions {
  double l2 = 0.1;
  double tolerance = 1e-4;  // on the gradient max-norm
  int max_iterations = 200;
};

// Feature indices follow first appearance in data; weights start at zero and
// are fit by L-BFGS. The optimizer record is copied to run when given.
CrfModel TrainCrf(const std::vector<CrfExample> &data,
                  const std::vector<std::string> &label_names,
                  const CrfTrainOptions &options, LbfgsResult *run = nullptr);

// Viterbi labels for a feature sequence; empty input gives empty output.
std::vector<int> TagSequence(const CrfModel &model, const FeatureSets &features);

}  // namespace slu

#endif  // SLU_CRF_H_
