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

#include "slu/crf.h"

#include <algorithm>
#include <cmath>

#include "slu/common.h"

namespace slu {

namespace {

double LogSumExp(const double *values, int n) {
  double m = -INFINITY;
  for (int i = 0; i < n; ++i) m = std::max(m, values[i]);
  if (m == -INFINITY) return m;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::exp(values[i] - m);
  return m + std::log(sum);
}

Lattice EncodedLattice(const std::vector<double> &params, int num_labels,
                       const EncodedSequence &seq) {
  Lattice lattice;
  lattice.length = static_cast<int>(seq.features.size());
  lattice.num_labels = num_labels;
  lattice.emission.assign(static_cast<size_t>(lattice.length) * num_labels, 0.0);
  for (int t = 0; t < lattice.length; ++t) {
    double *row = lattice.emission.data() + static_cast<size_t>(t) * num_labels;
    for (int f : seq.features[t]) {
      const double *w = params.data() + static_cast<size_t>(f) * num_labels;
      for (int y = 0; y < num_labels; ++y) row[y] += w[y];
    }
  }
  const size_t offset = params.size() - static_cast<size_t>(num_labels) * num_labels;
  lattice.transition.assign(params.begin() + offset, params.end());
  return lattice;
}

void CheckGold(const EncodedSequence &seq, int num_labels) {
  if (seq.labels.size() != seq.features.size()) {
    throw Error("gold label count does not match the sequence length");
  }
  for (int y : seq.labels) {
    if (y < 0 || y >= num_labels) {
      throw Error("gold label " + std::to_string(y) + " outside [0, " +
                  std::to_string(num_labels) + ")");
    }
  }
}

// Negative log-likelihood of one sequence and its marginals.
double SequenceLoss(const std::vector<double> &params, int num_labels,
                    const EncodedSequence &seq, Marginals &marginals) {
  const Lattice lattice = EncodedLattice(params, num_labels, seq);
  marginals = ForwardBackward(lattice);
  return marginals.log_partition - PathScore(lattice, seq.labels);
}

// Adds the data-term gradient of one sequence to label column y.
void AccumulateColumn(const EncodedSequence &seq, const Marginals &m, int num_labels,
                      int y, double *emission_grad, double *transition_grad) {
  const int length = static_cast<int>(seq.features.size());
  for (int t = 0; t < length; ++t) {
    const double delta = m.unary[static_cast<size_t>(t) * num_labels + y] -
                         (seq.labels[t] == y ? 1.0 : 0.0);
    for (int f : seq.features[t]) emission_grad[static_cast<size_t>(f) * num_labels + y] += delta;
  }
  for (int t = 0; t + 1 < length; ++t) {
    const double *pair = m.pairwise.data() + static_cast<size_t>(t) * num_labels * num_labels;
    for (int from = 0; from < num_labels; ++from) {
      double delta = pair[static_cast<size_t>(from) * num_labels + y];
      if (seq.labels[t] == from && seq.labels[t + 1] == y) delta -= 1.0;
      transition_grad[static_cast<size_t>(from) * num_labels + y] += delta;
    }
  }
}

double AddRegularizer(const std::vector<double> &params, double l2, double data_loss,
                      std::vector<double> &grad) {
  double norm2 = 0.0;
  for (size_t j = 0; j < params.size(); ++j) {
    norm2 += params[j] * params[j];
    grad[j] += l2 * params[j];
  }
  return data_loss + 0.5 * l2 * norm2;
}

}  // namespace

int CrfModel::FeatureId(const std::string &name) const {
  if (feature_index_.size() != feature_names.size()) {
    throw Error("CRF feature index is stale; call RebuildIndex()");
  }
  auto it = feature_index_.find(name);
  return it == feature_index_.end() ? -1 : it->second;
}

void CrfModel::RebuildIndex() {
  feature_index_.clear();
  feature_index_.reserve(feature_names.size());
  for (size_t i = 0; i < feature_names.size(); ++i) {
    if (!feature_index_.emplace(feature_names[i], static_cast<int>(i)).second) {
      throw Error("duplicate CRF feature '" + feature_names[i] + "'");
    }
  }
}

bool CrfModel::operator==(const CrfModel &other) const {
  return label_names == other.label_names && feature_names == other.feature_names &&
         emission == other.emission && transition == other.transition && l2 == other.l2;
}

Lattice BuildLattice(const CrfModel &model, const FeatureSets &features) {
  if (features.empty()) throw Error("cannot build a lattice for an empty sequence");
  const int num_labels = model.num_labels();
  Lattice lattice;
  lattice.length = static_cast<int>(features.size());
  lattice.num_labels = num_labels;
  lattice.emission.assign(static_cast<size_t>(lattice.length) * num_labels, 0.0);
  for (int t = 0; t < lattice.length; ++t) {
    double *row = lattice.emission.data() + static_cast<size_t>(t) * num_labels;
    for (const std::string &name : features[t]) {
      const int f = model.FeatureId(name);
      if (f < 0) continue;
      const double *w = model.emission.data() + static_cast<size_t>(f) * num_labels;
      for (int y = 0; y < num_labels; ++y) row[y] += w[y];
    }
  }
  lattice.transition = model.transition;
  return lattice;
}

Marginals ForwardBackward(const Lattice &lattice) {
  const int T = lattice.length;
  const int L = lattice.num_labels;
  if (T < 1 || L < 1) throw Error("lattice must have at least one position and label");
  for (double v : lattice.emission) {
    if (!std::isfinite(v)) throw Error("lattice holds a non-finite emission score");
  }
  for (double v : lattice.transition) {
    if (!std::isfinite(v)) throw Error("lattice holds a non-finite transition score");
  }

  std::vector<double> alpha(static_cast<size_t>(T) * L), beta(static_cast<size_t>(T) * L, 0.0);
  std::vector<double> scratch(L);
  for (int y = 0; y < L; ++y) alpha[y] = lattice.Emission(0, y);
  for (int t = 1; t < T; ++t) {
    for (int y = 0; y < L; ++y) {
      for (int from = 0; from < L; ++from) {
        scratch[from] = alpha[static_cast<size_t>(t - 1) * L + from] + lattice.Transition(from, y);
      }
      alpha[static_cast<size_t>(t) * L + y] = LogSumExp(scratch.data(), L) + lattice.Emission(t, y);
    }
  }
  for (int t = T - 2; t >= 0; --t) {
    for (int from = 0; from < L; ++from) {
      for (int y = 0; y < L; ++y) {
        scratch[y] = lattice.Transition(from, y) + lattice.Emission(t + 1, y) +
                     beta[static_cast<size_t>(t + 1) * L + y];
      }
      beta[static_cast<size_t>(t) * L + from] = LogSumExp(scratch.data(), L);
    }
  }

  Marginals m;
  m.log_partition = LogSumExp(alpha.data() + static_cast<size_t>(T - 1) * L, L);
  m.unary.resize(static_cast<size_t>(T) * L);
  for (size_t i = 0; i < m.unary.size(); ++i) {
    m.unary[i] = std::exp(alpha[i] + beta[i] - m.log_partition);
  }
  m.pairwise.resize(static_cast<size_t>(std::max(T - 1, 0)) * L * L);
  for (int t = 0; t + 1 < T; ++t) {
    double *pair = m.pairwise.data() + static_cast<size_t>(t) * L * L;
    for (int from = 0; from < L; ++from) {
      const double a = alpha[static_cast<size_t>(t) * L + from];
      for (int y = 0; y < L; ++y) {
        pair[static_cast<size_t>(from) * L + y] =
            std::exp(a + lattice.Transition(from, y) + lattice.Emission(t + 1, y) +
                     beta[static_cast<size_t>(t + 1) * L + y] - m.log_partition);
      }
    }
  }
  return m;
}

Decoding Viterbi(const Lattice &lattice) {
  const int T = lattice.length;
  const int L = lattice.num_labels;
  if (T < 1 || L < 1) throw Error("lattice must have at least one position and label");
  std::vector<double> delta(static_cast<size_t>(T) * L);
  std::vector<int> back(static_cast<size_t>(T) * L, 0);
  for (int y = 0; y < L; ++y) delta[y] = lattice.Emission(0, y);
  for (int t = 1; t < T; ++t) {
    for (int y = 0; y < L; ++y) {
      int best = 0;
      double best_score = delta[static_cast<size_t>(t - 1) * L] + lattice.Transition(0, y);
      for (int from = 1; from < L; ++from) {
        const double s = delta[static_cast<size_t>(t - 1) * L + from] + lattice.Transition(from, y);
        if (s > best_score) {
          best_score = s;
          best = from;
        }
      }
      delta[static_cast<size_t>(t) * L + y] = best_score + lattice.Emission(t, y);
      back[static_cast<size_t>(t) * L + y] = best;
    }
  }
  Decoding d;
  d.labels.resize(T);
  const double *last = delta.data() + static_cast<size_t>(T - 1) * L;
  int y = static_cast<int>(std::max_element(last, last + L) - last);
  d.score = last[y];
  for (int t = T - 1; t >= 0; --t) {
    d.labels[t] = y;
    y = back[static_cast<size_t>(t) * L + y];
  }
  return d;
}

double PathScore(const Lattice &lattice, const std::vector<int> &labels) {
  if (static_cast<int>(labels.size()) != lattice.length) {
    throw Error("path length does not match the lattice");
  }
  double score = lattice.Emission(0, labels[0]);
  for (int t = 1; t < lattice.length; ++t) {
    score = score + lattice.Transition(labels[t - 1], labels[t]);
    score = score + lattice.Emission(t, labels[t]);
  }
  return score;
}

EncodedSequence Encode(const CrfModel &model, const CrfExample &example) {
  EncodedSequence seq;
  seq.labels = example.labels;
  seq.features.reserve(example.features.size());
  for (const auto &names : example.features) {
    std::vector<int> ids;
    ids.reserve(names.size());
    for (const std::string &name : names) {
      const int f = model.FeatureId(name);
      if (f >= 0) ids.push_back(f);
    }
    seq.features.push_back(std::move(ids));
  }
  return seq;
}

double CrfObjectiveSerial(const std::vector<double> &params, int num_features,
                          int num_labels, const std::vector<EncodedSequence> &data,
                          double l2, std::vector<double> &grad) {
  const size_t emission_size = static_cast<size_t>(num_features) * num_labels;
  grad.assign(params.size(), 0.0);
  double data_loss = 0.0;
  Marginals m;
  for (const EncodedSequence &seq : data) {
    CheckGold(seq, num_labels);
    if (seq.features.empty()) continue;
    data_loss += SequenceLoss(params, num_labels, seq, m);
    for (int y = 0; y < num_labels; ++y) {
      AccumulateColumn(seq, m, num_labels, y, grad.data(), grad.data() + emission_size);
    }
  }
  return AddRegularizer(params, l2, data_loss, grad);
}

double CrfObjective(const std::vector<double> &params, int num_features,
                    int num_labels, const std::vector<EncodedSequence> &data,
                    double l2, std::vector<double> &grad) {
  const size_t emission_size = static_cast<size_t>(num_features) * num_labels;
  const long n = static_cast<long>(data.size());
  for (const EncodedSequence &seq : data) CheckGold(seq, num_labels);
  grad.assign(params.size(), 0.0);
  std::vector<double> losses(n, 0.0);
  std::vector<Marginals> marginals(n);

#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < n; ++i) {
    if (data[i].features.empty()) continue;
    losses[i] = SequenceLoss(params, num_labels, data[i], marginals[i]);
  }

  // Column y of both weight blocks belongs to one thread, which visits the
  // sequences in order.
#pragma omp parallel for schedule(static)
  for (int y = 0; y < num_labels; ++y) {
    for (long i = 0; i < n; ++i) {
      if (data[i].features.empty()) continue;
      AccumulateColumn(data[i], marginals[i], num_labels, y, grad.data(),
                       grad.data() + emission_size);
    }
  }

  double data_loss = 0.0;
  for (long i = 0; i < n; ++i) data_loss += losses[i];
  return AddRegularizer(params, l2, data_loss, grad);
}

NllResult NllAndGradient(const CrfModel &model, const std::vector<CrfExample> &batch,
                         double l2) {
  if (batch.empty()) throw Error("batch is empty");
  std::vector<EncodedSequence> data;
  data.reserve(batch.size());
  for (const CrfExample &ex : batch) data.push_back(Encode(model, ex));
  std::vector<double> params = model.emission;
  params.insert(params.end(), model.transition.begin(), model.transition.end());
  NllResult result;
  result.value = CrfObjective(params, model.num_features(), model.num_labels(), data, l2,
                              result.gradient);
  return result;
}

CrfModel TrainCrf(const std::vector<CrfExample> &data,
                  const std::vector<std::string> &label_names,
                  const CrfTrainOptions &options, LbfgsResult *run) {
  if (data.empty()) throw Error("training data is empty");
  if (label_names.empty()) throw Error("CRF needs at least one label");
  if (options.l2 < 0) throw Error("l2 must be non-negative");
  CrfModel model;
  model.label_names = label_names;
  model.l2 = options.l2;
  {
    std::unordered_map<std::string, int> seen;
    for (const CrfExample &ex : data) {
      for (const auto &names : ex.features) {
        for (const std::string &name : names) {
          if (seen.emplace(name, static_cast<int>(model.feature_names.size())).second) {
            model.feature_names.push_back(name);
          }
        }
      }
    }
  }
  model.RebuildIndex();
  const int F = model.num_features();
  const int L = model.num_labels();

  std::vector<EncodedSequence> encoded;
  encoded.reserve(data.size());
  for (const CrfExample &ex : data) {
    encoded.push_back(Encode(model, ex));
    CheckGold(encoded.back(), L);
  }

  Objective objective = [&](const std::vector<double> &x, std::vector<double> &g) {
    return CrfObjective(x, F, L, encoded, options.l2, g);
  };
  LbfgsOptions lbfgs;
  lbfgs.max_iterations = options.max_iterations;
  lbfgs.gradient_tolerance = options.tolerance;
  const size_t emission_size = static_cast<size_t>(F) * L;
  LbfgsResult result =
      MinimizeLbfgs(objective, std::vector<double>(emission_size + L * L, 0.0), lbfgs);
  model.emission.assign(result.x.begin(), result.x.begin() + emission_size);
  model.transition.assign(result.x.begin() + emission_size, result.x.end());
  if (run) *run = std::move(result);
  return model;
}

std::vector<int> TagSequence(const CrfModel &model, const FeatureSets &features) {
  if (features.empty()) return {};
  return Viterbi(BuildLattice(model, features)).labels;
}

}  // namespace slu
