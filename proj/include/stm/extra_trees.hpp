// include/stm/extra_trees.hpp

// Copyright 2026 The stmaudio Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "stm/classify.hpp"
#include "stm/common.hpp"

// Extremely randomized trees: every tree sees the full training set (no
// bootstrap); at each node a random feature subset gets one uniformly
// sampled threshold each, and the candidate with the best Gini gain wins.
// Tree t draws from its own RNG stream derived from (seed, t), so parallel
// and serial training grow identical forests.

namespace stm {

/// Class probabilities ordered (P(-1), P(+1)).
using ClassProbs = std::array<double, 2>;

struct TreeNode {
  int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int32_t left = -1;   // child index: x[feature] < threshold
  int32_t right = -1;  // child index: x[feature] >= threshold
  ClassProbs prob{0.0, 0.0};
};

struct ExtraTreesModel {
  std::vector<std::vector<TreeNode>> trees;
  uint32_t features_per_node = 0;
  uint32_t min_samples_split = 2;
  uint64_t rng_seed = 0;
  size_t dim = 0;
};

/// Gini impurity 1 - sum_l p_l^2 of counts (n_neg, n_pos).
inline double gini_impurity(size_t n_neg, size_t n_pos) {
  const double n = static_cast<double>(n_neg + n_pos);
  if (n == 0.0) return 0.0;
  const double p0 = n_neg / n, p1 = n_pos / n;
  return 1.0 - (p0 * p0 + p1 * p1);
}

namespace et_detail {

inline uint64_t mix_seed(uint64_t seed, uint64_t t) {
  // splitmix64 over (seed, tree index) for independent streams.
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (t + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class TreeBuilder {
 public:
  TreeBuilder(const LabeledSet& data, uint32_t features_per_node,
              uint32_t min_samples_split, uint64_t stream_seed)
      : data_(data),
        n_features_(features_per_node),
        min_split_(min_samples_split),
        rng_(stream_seed),
        feature_pool_(data.dim()) {
    for (size_t j = 0; j < feature_pool_.size(); ++j)
      feature_pool_[j] = static_cast<uint32_t>(j);
  }

  std::vector<TreeNode> build() {
    std::vector<size_t> all(data_.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = i;
    nodes_.clear();
    grow(std::move(all));
    return std::move(nodes_);
  }

 private:
  ClassProbs node_probs(const std::vector<size_t>& idx) const {
    size_t neg = 0;
    for (size_t i : idx) neg += data_.labels[i] == -1 ? 1 : 0;
    const double n = static_cast<double>(idx.size());
    return {neg / n, (idx.size() - neg) / n};
  }

  int32_t make_leaf(const std::vector<size_t>& idx) {
    TreeNode leaf;
    leaf.prob = node_probs(idx);
    nodes_.push_back(leaf);
    return static_cast<int32_t>(nodes_.size() - 1);
  }

  struct Candidate {
    uint32_t feature = 0;
    double threshold = 0.0;
    double gain = -1.0;
  };

  int32_t grow(std::vector<size_t> idx) {
    size_t neg = 0;
    for (size_t i : idx) neg += data_.labels[i] == -1 ? 1 : 0;
    const size_t pos = idx.size() - neg;
    if (neg == 0 || pos == 0 || idx.size() < min_split_)
      return make_leaf(idx);

    const double parent_gini = gini_impurity(neg, pos);
    Candidate best;
    const size_t d = data_.dim();
    const uint32_t tries = std::min<uint32_t>(n_features_,
                                              static_cast<uint32_t>(d));
    for (uint32_t j = 0; j < tries; ++j) {
      // Partial Fisher-Yates draw without replacement.
      std::uniform_int_distribution<size_t> pick(j, d - 1);
      std::swap(feature_pool_[j], feature_pool_[pick(rng_)]);
      const uint32_t feat = feature_pool_[j];

      double lo = data_.vectors[idx[0]][feat], hi = lo;
      for (size_t i : idx) {
        const double v = data_.vectors[i][feat];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (!(hi > lo)) continue;  // constant at this node
      std::uniform_real_distribution<double> uth(lo, hi);
      const double theta = uth(rng_);
      if (!(theta > lo) || !(theta < hi)) continue;  // degenerate draw

      size_t ln = 0, lp = 0, rn = 0, rp = 0;
      for (size_t i : idx) {
        const bool left = data_.vectors[i][feat] < theta;
        const bool is_neg = data_.labels[i] == -1;
        if (left)
          (is_neg ? ln : lp) += 1;
        else
          (is_neg ? rn : rp) += 1;
      }
      if (ln + lp == 0 || rn + rp == 0) continue;
      const double nl = static_cast<double>(ln + lp);
      const double nr = static_cast<double>(rn + rp);
      const double gain = parent_gini -
                          nl / idx.size() * gini_impurity(ln, lp) -
                          nr / idx.size() * gini_impurity(rn, rp);
      if (gain > best.gain) best = {feat, theta, gain};
    }
    if (best.gain < 0.0) return make_leaf(idx);

    std::vector<size_t> left_idx, right_idx;
    for (size_t i : idx) {
      if (data_.vectors[i][best.feature] < best.threshold)
        left_idx.push_back(i);
      else
        right_idx.push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    TreeNode node;
    node.feature = static_cast<int32_t>(best.feature);
    node.threshold = best.threshold;
    nodes_.push_back(node);
    const int32_t self = static_cast<int32_t>(nodes_.size() - 1);
    const int32_t l = grow(std::move(left_idx));
    const int32_t r = grow(std::move(right_idx));
    nodes_[self].left = l;
    nodes_[self].right = r;
    return self;
  }

  const LabeledSet& data_;
  uint32_t n_features_;
  uint32_t min_split_;
  std::mt19937_64 rng_;
  std::vector<uint32_t> feature_pool_;
  std::vector<TreeNode> nodes_;
};

}  // namespace et_detail

/// features_per_node == 0 picks round(sqrt(d)).
inline ExtraTreesModel extratrees_train(const LabeledSet& data,
                                        uint32_t num_trees = 100,
                                        uint32_t features_per_node = 0,
                                        uint32_t min_samples_split = 2,
                                        uint64_t seed = 0) {
  data.validate(true);
  if (num_trees < 1)
    throw InvalidArgumentError("extratrees_train: need at least one tree");
  const size_t d = data.dim();
  if (features_per_node == 0)
    features_per_node = static_cast<uint32_t>(
        std::max(1.0, std::round(std::sqrt(static_cast<double>(d)))));
  if (features_per_node > d)
    throw InvalidArgumentError(
        "extratrees_train: features_per_node exceeds dimensionality");
  if (min_samples_split < 2) min_samples_split = 2;

  ExtraTreesModel m;
  m.features_per_node = features_per_node;
  m.min_samples_split = min_samples_split;
  m.rng_seed = seed;
  m.dim = d;
  m.trees.resize(num_trees);
  parallel_for(num_trees, [&](size_t t) {
    et_detail::TreeBuilder builder(data, features_per_node, min_samples_split,
                                   et_detail::mix_seed(seed, t));
    m.trees[t] = builder.build();
  });
  return m;
}

/// Leaf distribution reached by x in one tree. Root is node 0.
inline const ClassProbs& tree_posterior(const std::vector<TreeNode>& tree,
                                        const std::vector<double>& x) {
  int32_t cur = 0;
  while (tree[cur].feature >= 0)
    cur = x[tree[cur].feature] < tree[cur].threshold ? tree[cur].left
                                                     : tree[cur].right;
  return tree[cur].prob;
}

/// Forest posterior: mean of the reached leaf distributions.
inline ClassProbs extratrees_posterior(const ExtraTreesModel& m,
                                       const std::vector<double>& x) {
  if (x.size() != m.dim)
    throw InvalidArgumentError("extratrees_predict: dimension mismatch");
  ClassProbs acc{0.0, 0.0};
  for (const auto& tree : m.trees) {
    const auto& p = tree_posterior(tree, x);
    acc[0] += p[0];
    acc[1] += p[1];
  }
  acc[0] /= m.trees.size();
  acc[1] /= m.trees.size();
  return acc;
}

/// argmax label; an exact posterior tie resolves to -1.
inline int extratrees_predict(const ExtraTreesModel& m,
                              const std::vector<double>& x) {
  const auto p = extratrees_posterior(m, x);
  return p[1] > p[0] ? +1 : -1;
}

}  // namespace stm
