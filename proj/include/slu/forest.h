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

#ifndef SLU_FOREST_H_
#define SLU_FOREST_H_

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace slu {

struct TreeNode {
  // Internal nodes: feature >= 0, x[feature] <= threshold goes left.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  // Leaves: class counts of the training samples that reached the leaf.
  std::vector<double> histogram;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode &) const = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  int Depth() const;
  bool operator==(const DecisionTree &) const = default;
};

struct ForestParams {
  int num_trees = 100;
  int max_depth = std::numeric_limits<int>::max();
  int min_leaf = 1;
  int features_per_split = 2;
  bool bootstrap = true;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  int num_features = 0;
  int num_classes = 0;
  uint64_t seed = 0;
  std::vector<std::string> class_names;

  bool operator==(const ForestModel &) const = default;
};

struct LabeledDense {
  std::vector<double> x;
  int label = 0;
};

// Gini-split CART trees on seeded bootstrap samples, with a seeded random
// feature subset per node. Thresholds are midpoints between consecutive
// distinct values. Tree t draws from DeriveSeed(seed, t), so the forest does
// not depend on how trees are scheduled across threads.
ForestModel TrainForest(const std::vector<LabeledDense> &data, int num_classes,
                        const ForestParams &params, uint64_t seed);

// Sums leaf histograms over trees; argmax with lowest-index tie-break.
int PredictForest(const ForestModel &model, const std::vector<double> &x);

}  // namespace slu

#endif  // SLU_FOREST_H_
