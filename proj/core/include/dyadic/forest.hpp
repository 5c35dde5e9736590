#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dyadic/class_weights.hpp"
#include "dyadic/matrix.hpp"

namespace dyadic {

struct ForestParams {
  std::size_t n_trees = 100;
  std::optional<std::size_t> max_depth;           // unlimited when empty
  std::optional<std::size_t> features_per_split;  // ceil(sqrt(d)) when empty
  std::uint64_t seed = 0;
  bool bootstrap = true;  // false grows every tree on the full training set

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // x[feature] <= threshold goes left
  int left = -1;
  int right = -1;
  double mass[2] = {0.0, 0.0};  // class-weighted training mass reaching the node
  int vote = 0;                 // heavier class of `mass`; the prediction at a leaf

  bool is_leaf() const noexcept { return feature < 0; }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  // A depth cap stops the walk early and uses the vote of the node reached,
  // which is exactly what a tree grown with that cap would answer.
  const TreeNode& leaf_for(std::span<const double> x,
                           std::optional<std::size_t> max_depth = std::nullopt) const;
  int predict(std::span<const double> x, std::optional<std::size_t> max_depth = std::nullopt) const {
    return leaf_for(x, max_depth).vote;
  }
  std::size_t depth() const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  ForestParams params;
  ClassWeights weights;
  std::size_t n_features = 0;
  std::size_t features_per_split = 0;
  // Class that wins exact ties (leaf mass and forest vote): the one carrying
  // more total training weight, class 0 if that is equal too.
  int tie_class = 0;

  friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

// Trees split on class-weighted Gini decrease; leaves hold weighted class
// mass and vote for the heavier class. Per-tree randomness comes from a
// stream derived from (seed, tree index), so the fit is deterministic and
// tree order carries no information. Growing with max_depth = k gives the
// same trees as growing unlimited and predicting with a cap of k.
// Throws SingleClassInput, DimensionMismatch, InvalidParams.
ForestModel train_forest(const Matrix& x, std::span<const int> y, const ClassWeights& weights,
                         const ForestParams& params);

// Majority of per-tree votes; exact ties go to model.tie_class.
int predict(const ForestModel& model, std::span<const double> x,
            std::optional<std::size_t> max_depth = std::nullopt);

// Number of trees voting for class 1.
std::size_t positive_votes(const ForestModel& model, std::span<const double> x,
                           std::optional<std::size_t> max_depth = std::nullopt);

}  // namespace dyadic
