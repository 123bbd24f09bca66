/*
 * Copyright 2026 The AeroLens Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef AEROLENS_TREE_HPP_
#define AEROLENS_TREE_HPP_

// CART classification trees (Gini impurity, midpoint thresholds) and a
// bagged random forest built from them.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "aerolens/error.hpp"
#include "aerolens/matrix.hpp"
#include "aerolens/random.hpp"

namespace aerolens {

struct TreeParams {
  std::size_t max_depth = 0;  // 0 = unbounded
  std::size_t min_leaf = 1;
  std::size_t max_features = 0;  // features tried per split; 0 = all
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;  // taken when x[feature] <= threshold
  int right = -1;
  std::vector<double> distribution;  // class frequencies at this node

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& Leaf(std::span<const double> x) const {
    const TreeNode* node = &nodes.front();
    while (!node->is_leaf()) {
      node = &nodes[static_cast<std::size_t>(
          x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                        : node->right)];
    }
    return *node;
  }

  std::size_t SplitCount() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
  }
};

inline double Gini(std::span<const double> counts, double total) {
  if (total <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (double c : counts) sum_sq += (c / total) * (c / total);
  return 1.0 - sum_sq;
}

// Index of the largest entry; the first one on ties.
inline std::size_t ArgMax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

namespace detail {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double impurity = std::numeric_limits<double>::infinity();
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> y, std::size_t n_classes,
              const TreeParams& params, Rng* rng)
      : x_(x), y_(y), n_classes_(n_classes), params_(params), rng_(rng) {}

  DecisionTree Build(std::vector<std::size_t> rows) {
    DecisionTree tree;
    struct Pending {
      std::size_t node;
      std::vector<std::size_t> rows;
      std::size_t depth;
    };
    tree.nodes.emplace_back();
    std::vector<Pending> stack;
    stack.push_back({0, std::move(rows), 0});
    while (!stack.empty()) {
      Pending item = std::move(stack.back());
      stack.pop_back();
      std::vector<double> counts(n_classes_, 0.0);
      for (auto r : item.rows) counts[static_cast<std::size_t>(y_[r])] += 1.0;
      const auto n = static_cast<double>(item.rows.size());
      const double parent_gini = Gini(counts, n);
      {
        auto& node = tree.nodes[item.node];
        node.distribution.resize(n_classes_);
        for (std::size_t c = 0; c < n_classes_; ++c) node.distribution[c] = counts[c] / n;
      }
      const bool depth_reached = params_.max_depth != 0 && item.depth >= params_.max_depth;
      if (parent_gini <= 0.0 || depth_reached || item.rows.size() < 2 * params_.min_leaf) {
        continue;
      }
      const SplitChoice split = BestSplit(item.rows);
      if (split.feature < 0) continue;
      if (split.impurity > parent_gini + 1e-12) {
        throw std::logic_error("split increased weighted Gini impurity");
      }
      std::vector<std::size_t> left, right;
      for (auto r : item.rows) {
        (x_(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right)
            .push_back(r);
      }
      const auto left_id = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[item.node];
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.left = left_id;
      node.right = left_id + 1;
      stack.push_back({static_cast<std::size_t>(left_id + 1), std::move(right), item.depth + 1});
      stack.push_back({static_cast<std::size_t>(left_id), std::move(left), item.depth + 1});
    }
    return tree;
  }

 private:
  std::vector<std::size_t> CandidateFeatures() {
    std::vector<std::size_t> features(x_.cols());
    std::iota(features.begin(), features.end(), 0);
    if (params_.max_features == 0 || params_.max_features >= features.size() || !rng_) {
      return features;
    }
    for (std::size_t i = 0; i < params_.max_features; ++i) {
      std::swap(features[i], features[i + rng_->Index(features.size() - i)]);
    }
    features.resize(params_.max_features);
    std::sort(features.begin(), features.end());
    return features;
  }

  // Lowest weighted Gini; ties keep the lowest feature, then lowest threshold.
  SplitChoice BestSplit(const std::vector<std::size_t>& rows) {
    SplitChoice best;
    const std::size_t n = rows.size();
    std::vector<std::size_t> order(rows);
    std::vector<double> left(n_classes_), right(n_classes_);
    for (std::size_t f : CandidateFeatures()) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return x_(a, f) < x_(b, f); });
      std::fill(left.begin(), left.end(), 0.0);
      std::fill(right.begin(), right.end(), 0.0);
      for (auto r : order) right[static_cast<std::size_t>(y_[r])] += 1.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto label = static_cast<std::size_t>(y_[order[i]]);
        left[label] += 1.0;
        right[label] -= 1.0;
        const double a = x_(order[i], f);
        const double b = x_(order[i + 1], f);
        if (!(a < b)) continue;
        const std::size_t n_left = i + 1;
        if (n_left < params_.min_leaf || n - n_left < params_.min_leaf) continue;
        const auto nl = static_cast<double>(n_left);
        const auto nr = static_cast<double>(n - n_left);
        const double impurity =
            (nl * Gini(left, nl) + nr * Gini(right, nr)) / static_cast<double>(n);
        if (impurity < best.impurity) {
          double mid = a + (b - a) / 2.0;
          if (!(mid < b)) mid = a;
          best = {static_cast<int>(f), mid, impurity};
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const int> y_;
  std::size_t n_classes_;
  TreeParams params_;
  Rng* rng_;
};

inline void CheckTrainingInput(const Matrix& x, std::span<const int> y, std::size_t n_classes) {
  if (x.empty() || y.empty()) throw Error(Errc::kEmptyInput, "no training rows");
  if (x.rows() != y.size()) throw Error(Errc::kLengthMismatch, "one label per row required");
  for (int label : y) {
    if (label < 0 || static_cast<std::size_t>(label) >= n_classes) {
      throw Error(Errc::kInvalidArgument, "label index out of range");
    }
  }
}

}  // namespace detail

inline DecisionTree TrainTree(const Matrix& x, std::span<const int> y, std::size_t n_classes,
                              const TreeParams& params = {}) {
  detail::CheckTrainingInput(x, y, n_classes);
  if (params.min_leaf == 0) throw Error(Errc::kInvalidArgument, "min_leaf must be >= 1");
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return detail::TreeBuilder(x, y, n_classes, params, nullptr).Build(std::move(rows));
}

struct ForestParams {
  std::size_t n_trees = 50;
  TreeParams tree{.max_depth = 0, .min_leaf = 1, .max_features = 2};
  bool bootstrap = true;
};

struct RandomForest {
  std::vector<DecisionTree> trees;
  std::vector<std::uint64_t> tree_seeds;
  std::size_t n_classes = 0;

  // Vote shares; the majority label is their first argmax.
  std::vector<double> VoteShares(std::span<const double> x) const {
    std::vector<double> votes(n_classes, 0.0);
    for (const auto& tree : trees) votes[ArgMax(tree.Leaf(x).distribution)] += 1.0;
    for (double& v : votes) v /= static_cast<double>(trees.size());
    return votes;
  }
};

// Tree i is grown from its own seed DeriveSeed(seed, "forest/tree", i), which
// drives both its bootstrap sample and its per-split feature subsets.
inline RandomForest TrainForest(const Matrix& x, std::span<const int> y, std::size_t n_classes,
                                const ForestParams& params, std::uint64_t seed) {
  detail::CheckTrainingInput(x, y, n_classes);
  if (params.n_trees == 0) throw Error(Errc::kInvalidArgument, "n_trees must be >= 1");
  if (params.tree.min_leaf == 0) throw Error(Errc::kInvalidArgument, "min_leaf must be >= 1");
  RandomForest forest;
  forest.n_classes = n_classes;
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    const std::uint64_t tree_seed = DeriveSeed(seed, "forest/tree", t);
    Rng rng(tree_seed);
    std::vector<std::size_t> rows(x.rows());
    if (params.bootstrap) {
      for (auto& r : rows) r = rng.Index(x.rows());
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    forest.trees.push_back(
        detail::TreeBuilder(x, y, n_classes, params.tree, &rng).Build(std::move(rows)));
    forest.tree_seeds.push_back(tree_seed);
  }
  return forest;
}

}  // namespace aerolens

#endif  // AEROLENS_TREE_HPP_
