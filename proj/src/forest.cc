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

#include "slu/forest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "slu/common.h"

namespace slu {

namespace {

double Gini(const std::vector<double> &counts, double total) {
  if (total <= 0) return 0.0;
  double sum_sq = 0.0;
  for (double c : counts) sum_sq += c * c;
  return 1.0 - sum_sq / (total * total);
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<LabeledDense> &data, int num_features,
              int num_classes, const ForestParams &params, Rng &rng)
      : data_(data),
        num_features_(num_features),
        num_classes_(num_classes),
        params_(params),
        rng_(rng) {}

  DecisionTree Build(std::vector<int> samples) {
    tree_.nodes.clear();
    Grow(std::move(samples), 0);
    return std::move(tree_);
  }

 private:
  std::vector<double> Histogram(const std::vector<int> &samples) const {
    std::vector<double> counts(num_classes_, 0.0);
    for (int s : samples) counts[data_[s].label] += 1.0;
    return counts;
  }

  int Grow(std::vector<int> samples, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    std::vector<double> counts = Histogram(samples);
    const double total = static_cast<double>(samples.size());

    int best_feature = -1;
    double best_threshold = 0.0;
    if (depth < params_.max_depth && Gini(counts, total) > 0.0 &&
        samples.size() >= 2 * static_cast<size_t>(params_.min_leaf)) {
      // Partial Fisher-Yates picks the candidate features for this node.
      std::vector<int> features(num_features_);
      std::iota(features.begin(), features.end(), 0);
      const int take = std::min(params_.features_per_split, num_features_);
      for (int i = 0; i < take; ++i) {
        const int j = i + static_cast<int>(UniformIndex(rng_, num_features_ - i));
        std::swap(features[i], features[j]);
      }
      // Impure nodes always split when a threshold exists, even without an
      // immediate Gini decrease (XOR-like layouts need two levels).
      double best_score = INFINITY;
      for (int fi = 0; fi < take; ++fi) {
        const int f = features[fi];
        std::vector<int> sorted = samples;
        std::stable_sort(sorted.begin(), sorted.end(), [&](int a, int b) {
          return data_[a].x[f] < data_[b].x[f];
        });
        std::vector<double> left(num_classes_, 0.0);
        std::vector<double> right = counts;
        for (size_t i = 0; i + 1 < sorted.size(); ++i) {
          const int label = data_[sorted[i]].label;
          left[label] += 1.0;
          right[label] -= 1.0;
          const double here = data_[sorted[i]].x[f];
          const double next = data_[sorted[i + 1]].x[f];
          if (here == next) continue;
          const double nl = static_cast<double>(i + 1);
          const double nr = total - nl;
          if (nl < params_.min_leaf || nr < params_.min_leaf) continue;
          const double score = nl * Gini(left, nl) + nr * Gini(right, nr);
          if (score < best_score - 1e-12) {
            best_score = score;
            best_feature = f;
            best_threshold = here + (next - here) / 2.0;
          }
        }
      }
    }

    if (best_feature < 0) {
      tree_.nodes[id].histogram = std::move(counts);
      return id;
    }
    std::vector<int> left_samples, right_samples;
    for (int s : samples) {
      (data_[s].x[best_feature] <= best_threshold ? left_samples : right_samples).push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();
    const int left = Grow(std::move(left_samples), depth + 1);
    const int right = Grow(std::move(right_samples), depth + 1);
    TreeNode &node = tree_.nodes[id];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left;
    node.right = right;
    return id;
  }

  const std::vector<LabeledDense> &data_;
  const int num_features_;
  const int num_classes_;
  const ForestParams &params_;
  Rng &rng_;
  DecisionTree tree_;
};

int DepthFrom(const DecisionTree &tree, int node) {
  const TreeNode &n = tree.nodes[node];
  if (n.is_leaf()) return 0;
  return 1 + std::max(DepthFrom(tree, n.left), DepthFrom(tree, n.right));
}

}  // namespace

int DecisionTree::Depth() const { return nodes.empty() ? 0 : DepthFrom(*this, 0); }

ForestModel TrainForest(const std::vector<LabeledDense> &data, int num_classes,
                        const ForestParams &params, uint64_t seed) {
  if (data.empty()) throw Error("training data is empty");
  if (params.num_trees < 1 || params.max_depth < 0 || params.min_leaf < 1 ||
      params.features_per_split < 1) {
    throw Error("forest parameters must be positive");
  }
  const int num_features = static_cast<int>(data[0].x.size());
  for (size_t i = 0; i < data.size(); ++i) {
    if (static_cast<int>(data[i].x.size()) != num_features) {
      throw Error("instance " + std::to_string(i) + " has dimension " +
                  std::to_string(data[i].x.size()) + ", expected " +
                  std::to_string(num_features));
    }
    if (data[i].label < 0 || data[i].label >= num_classes) {
      throw Error("instance " + std::to_string(i) + " has an invalid class index");
    }
  }

  ForestModel model;
  model.num_features = num_features;
  model.num_classes = num_classes;
  model.seed = seed;
  model.trees.resize(params.num_trees);
  for (int k = 0; k < num_classes; ++k) model.class_names.push_back(std::to_string(k));

  const int n = static_cast<int>(data.size());
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < params.num_trees; ++t) {
    Rng rng(DeriveSeed(seed, static_cast<uint64_t>(t)));
    std::vector<int> samples(n);
    if (params.bootstrap) {
      for (int i = 0; i < n; ++i) samples[i] = static_cast<int>(UniformIndex(rng, n));
      std::sort(samples.begin(), samples.end());
    } else {
      std::iota(samples.begin(), samples.end(), 0);
    }
    TreeBuilder builder(data, num_features, num_classes, params, rng);
    model.trees[t] = builder.Build(std::move(samples));
  }
  return model;
}

int PredictForest(const ForestModel &model, const std::vector<double> &x) {
  if (static_cast<int>(x.size()) != model.num_features) {
    throw Error("input has dimension " + std::to_string(x.size()) + ", forest expects " +
                std::to_string(model.num_features));
  }
  std::vector<double> votes(model.num_classes, 0.0);
  for (const DecisionTree &tree : model.trees) {
    int node = 0;
    while (!tree.nodes[node].is_leaf()) {
      const TreeNode &n = tree.nodes[node];
      node = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    const auto &hist = tree.nodes[node].histogram;
    for (int k = 0; k < model.num_classes; ++k) votes[k] += hist[k];
  }
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

}  // namespace slu
