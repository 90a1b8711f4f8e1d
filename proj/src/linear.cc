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

#include "slu/linear.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "slu/common.h"

namespace slu {

namespace {

void CheckTrainingData(const std::vector<LabeledVector> &data, int num_classes,
                       int num_features) {
  if (data.empty()) throw Error("training data is empty");
  if (num_classes < 1) throw Error("need at least one class");
  for (size_t i = 0; i < data.size(); ++i) {
    if (data[i].label < 0 || data[i].label >= num_classes) {
      throw Error("instance " + std::to_string(i) + " has class index " +
                  std::to_string(data[i].label) + " outside [0, " +
                  std::to_string(num_classes) + ")");
    }
    for (const auto &[index, value] : data[i].x.entries) {
      if (index < 0 || index >= num_features) {
        throw Error("instance " + std::to_string(i) + " has feature index " +
                    std::to_string(index) + " outside [0, " +
                    std::to_string(num_features) + ")");
      }
    }
  }
}

// Per-instance loss and residual p - onehot(y), written to loss/residual.
void InstanceResidual(const std::vector<double> &params, const LabeledVector &item,
                      int num_classes, int num_features, double *loss,
                      double *residual) {
  const double *bias = params.data() + static_cast<size_t>(num_classes) * num_features;
  double max_score = -INFINITY;
  for (int k = 0; k < num_classes; ++k) {
    const double *row = params.data() + static_cast<size_t>(k) * num_features;
    double s = bias[k];
    for (const auto &[index, value] : item.x.entries) s += row[index] * value;
    residual[k] = s;
    max_score = std::max(max_score, s);
  }
  double sum = 0.0;
  for (int k = 0; k < num_classes; ++k) sum += std::exp(residual[k] - max_score);
  const double log_z = max_score + std::log(sum);
  *loss = log_z - residual[item.label];
  for (int k = 0; k < num_classes; ++k) residual[k] = std::exp(residual[k] - log_z);
  residual[item.label] -= 1.0;
}

double Regularize(const std::vector<double> &params, int num_classes,
                  int num_features, double l2, double data_loss,
                  std::vector<double> &grad) {
  const size_t nw = static_cast<size_t>(num_classes) * num_features;
  double norm2 = 0.0;
  for (size_t j = 0; j < nw; ++j) {
    norm2 += params[j] * params[j];
    grad[j] += l2 * params[j];
  }
  return data_loss + 0.5 * l2 * norm2;
}

}  // namespace

double LogregObjectiveSerial(const std::vector<double> &params,
                             const std::vector<LabeledVector> &data,
                             int num_classes, int num_features, double l2,
                             std::vector<double> &grad) {
  const size_t nw = static_cast<size_t>(num_classes) * num_features;
  grad.assign(nw + num_classes, 0.0);
  std::vector<double> residual(num_classes);
  double data_loss = 0.0;
  for (const LabeledVector &item : data) {
    double loss;
    InstanceResidual(params, item, num_classes, num_features, &loss, residual.data());
    data_loss += loss;
    for (int k = 0; k < num_classes; ++k) {
      double *row = grad.data() + static_cast<size_t>(k) * num_features;
      for (const auto &[index, value] : item.x.entries) row[index] += residual[k] * value;
      grad[nw + k] += residual[k];
    }
  }
  return Regularize(params, num_classes, num_features, l2, data_loss, grad);
}

double LogregObjective(const std::vector<double> &params,
                       const std::vector<LabeledVector> &data, int num_classes,
                       int num_features, double l2, std::vector<double> &grad) {
  const size_t nw = static_cast<size_t>(num_classes) * num_features;
  const long n = static_cast<long>(data.size());
  grad.assign(nw + num_classes, 0.0);
  std::vector<double> losses(n);
  std::vector<double> residuals(static_cast<size_t>(n) * num_classes);

#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    InstanceResidual(params, data[i], num_classes, num_features, &losses[i],
                     residuals.data() + static_cast<size_t>(i) * num_classes);
  }

  // Each class row is owned by one thread and visits instances in order.
#pragma omp parallel for schedule(static)
  for (int k = 0; k < num_classes; ++k) {
    double *row = grad.data() + static_cast<size_t>(k) * num_features;
    double bias_grad = 0.0;
    for (long i = 0; i < n; ++i) {
      const double r = residuals[static_cast<size_t>(i) * num_classes + k];
      for (const auto &[index, value] : data[i].x.entries) row[index] += r * value;
      bias_grad += r;
    }
    grad[nw + k] = bias_grad;
  }

  double data_loss = 0.0;
  for (long i = 0; i < n; ++i) data_loss += losses[i];
  return Regularize(params, num_classes, num_features, l2, data_loss, grad);
}

LinearModel TrainLogreg(const std::vector<LabeledVector> &data, int num_classes,
                        int num_features, const LinearTrainOptions &options,
                        LbfgsResult *run) {
  CheckTrainingData(data, num_classes, num_features);
  if (options.regularization < 0) throw Error("l2 must be non-negative");
  const size_t nw = static_cast<size_t>(num_classes) * num_features;
  Objective objective = [&](const std::vector<double> &x, std::vector<double> &g) {
    return LogregObjective(x, data, num_classes, num_features, options.regularization, g);
  };
  LbfgsOptions lbfgs;
  lbfgs.max_iterations = options.max_epochs;
  lbfgs.gradient_tolerance = options.tolerance;
  LbfgsResult result = MinimizeLbfgs(objective, std::vector<double>(nw + num_classes, 0.0), lbfgs);

  LinearModel model;
  model.kind = LinearKind::kLogreg;
  model.num_classes = num_classes;
  model.num_features = num_features;
  model.weights.assign(result.x.begin(), result.x.begin() + nw);
  model.bias.assign(result.x.begin() + nw, result.x.end());
  for (int k = 0; k < num_classes; ++k) model.class_names.push_back(std::to_string(k));
  if (run) *run = std::move(result);
  return model;
}

LinearModel TrainSvm(const std::vector<LabeledVector> &data, int num_classes,
                     int num_features, const LinearTrainOptions &options) {
  CheckTrainingData(data, num_classes, num_features);
  const double c = options.regularization;
  if (!(c > 0)) throw Error("SVM penalty c must be positive");
  const long n = static_cast<long>(data.size());

  std::vector<double> qdiag(n);
  for (long i = 0; i < n; ++i) {
    double q = 1.0;  // bias feature
    for (const auto &[index, value] : data[i].x.entries) q += value * value;
    qdiag[i] = q;
  }

  LinearModel model;
  model.kind = LinearKind::kSvm;
  model.num_classes = num_classes;
  model.num_features = num_features;
  model.weights.assign(static_cast<size_t>(num_classes) * num_features, 0.0);
  model.bias.assign(num_classes, 0.0);
  for (int k = 0; k < num_classes; ++k) model.class_names.push_back(std::to_string(k));

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < num_classes; ++k) {
    double *w = model.weights.data() + static_cast<size_t>(k) * num_features;
    double b = 0.0;
    std::vector<double> alpha(n, 0.0);
    std::vector<long> order(n);
    std::iota(order.begin(), order.end(), 0L);
    Rng rng(DeriveSeed(0x5EED, static_cast<uint64_t>(k)));
    for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
      for (long i = n - 1; i > 0; --i) {
        std::swap(order[i], order[UniformIndex(rng, static_cast<uint64_t>(i) + 1)]);
      }
      double max_pg = -INFINITY, min_pg = INFINITY;
      for (long i : order) {
        const double y = data[i].label == k ? 1.0 : -1.0;
        double margin = b;
        for (const auto &[index, value] : data[i].x.entries) margin += w[index] * value;
        const double g = y * margin - 1.0;
        double pg = g;
        if (alpha[i] == 0.0) {
          pg = std::min(g, 0.0);
        } else if (alpha[i] == c) {
          pg = std::max(g, 0.0);
        }
        max_pg = std::max(max_pg, pg);
        min_pg = std::min(min_pg, pg);
        if (pg == 0.0) continue;
        const double old = alpha[i];
        alpha[i] = std::clamp(old - g / qdiag[i], 0.0, c);
        const double delta = (alpha[i] - old) * y;
        if (delta == 0.0) continue;
        for (const auto &[index, value] : data[i].x.entries) w[index] += delta * value;
        b += delta;
      }
      if (max_pg - min_pg < options.tolerance) break;
    }
    model.bias[k] = b;
  }
  return model;
}

Prediction PredictLinear(const LinearModel &model, const SparseVector &x) {
  for (const auto &[index, value] : x.entries) {
    if (index < 0 || index >= model.num_features) {
      throw Error("feature index " + std::to_string(index) + " outside model dimension " +
                  std::to_string(model.num_features));
    }
  }
  Prediction p;
  p.scores.resize(model.num_classes);
  for (int k = 0; k < model.num_classes; ++k) {
    const double *row = model.weights.data() + static_cast<size_t>(k) * model.num_features;
    double s = model.bias[k];
    for (const auto &[index, value] : x.entries) s += row[index] * value;
    p.scores[k] = s;
    if (s > p.scores[p.label]) p.label = k;
  }
  return p;
}

}  // namespace slu
