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

#ifndef SLU_LINEAR_H_
#define SLU_LINEAR_H_

#include <string>
#include <vector>

#include "slu/features.h"
#include "slu/optimize.h"

namespace slu {

enum class LinearKind { kLogreg, kSvm };

struct LinearModel {
  LinearKind kind = LinearKind::kLogreg;
  int num_classes = 0;
  int num_features = 0;
  std::vector<double> weights;  // num_classes x num_features, row-major
  std::vector<double> bias;     // num_classes
  std::vector<std::string> class_names;

  double Weight(int cls, int feature) const {
    return weights[static_cast<size_t>(cls) * num_features + feature];
  }
  bool operator==(const LinearModel &) const = default;
};

struct LabeledVector {
  SparseVector x;
  int label = 0;
};

struct LinearTrainOptions {
  double regularization = 1.0;  // l2 for logistic regression, c for the SVM
  double tolerance = 1e-6;
  int max_epochs = 500;
};

struct Prediction {
  int label = 0;
  std::vector<double> scores;
};

// Multinomial logistic regression minimizing
//   sum_i [logsumexp(s_i) - s_i[y_i]] + (l2/2) ||W||^2,   s_i = W x_i + b,
// by L-BFGS. The bias is unregularized. The optimizer record is copied to
// run when given.
LinearModel TrainLogreg(const std::vector<LabeledVector> &data, int num_classes,
                        int num_features, const LinearTrainOptions &options,
                        LbfgsResult *run = nullptr);

// One-vs-rest L1-loss linear SVMs, each minimizing
//   (1/2) ||w||^2 + c * sum_i max(0, 1 - y_i (w x_i + b)),
// with the bias folded into w as a constant feature, solved by dual
// coordinate descent in a seeded order.
LinearModel TrainSvm(const std::vector<LabeledVector> &data, int num_classes,
                     int num_features, const LinearTrainOptions &options);

// Argmax of W x + b, lowest class index on ties. Throws on a feature index
// outside the model.
Prediction PredictLinear(const LinearModel &model, const SparseVector &x);

// Logistic objective over params = [W row-major, b]. Writes the gradient
// into grad. The parallel kernel sums every coordinate in the same order as
// the serial reference, so the two agree bit for bit.
double LogregObjective(const std::vector<double> &params,
                       const std::vector<LabeledVector> &data, int num_classes,
                       int num_features, double l2, std::vector<double> &grad);
double LogregObjectiveSerial(const std::vector<double> &params,
                             const std::vector<LabeledVector> &data,
                             int num_classes, int num_features, double l2,
                             std::vector<double> &grad);

}  // namespace slu

#endif  // SLU_LINEAR_H_
