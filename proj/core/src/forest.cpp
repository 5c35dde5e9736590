#include "dyadic/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>

#include "dyadic/error.hpp"
#include "dyadic/rng.hpp"

namespace dyadic {

namespace {

int heavier_class(double mass0, double mass1, int tie_class) noexcept {
  const double tol = 1e-9 * (mass0 + mass1);
  if (mass1 - mass0 > tol) return 1;
  if (mass0 - mass1 > tol) return 0;
  return tie_class;
}

class TreeBuilder {
 public:
  // `columns` is the training matrix stored feature-major (n_rows per feature).
  TreeBuilder(std::span<const double> columns, std::size_t n_rows, std::span<const int> y,
              const ClassWeights& weights, std::size_t mtry, std::optional<std::size_t> max_depth,
              int tie_class, std::uint64_t seed)
      : columns_(columns), n_rows_(n_rows), y_(y), weights_(weights), mtry_(mtry),
        max_depth_(max_depth), tie_class_(tie_class), seed_(seed), rng_(seed) {
    pool_.resize(columns.size() / n_rows);
  }

  DecisionTree build(bool bootstrap) {
    const std::size_t n = n_rows_;
    rows_.resize(n);
    if (bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (auto& r : rows_) r = pick(rng_);
    } else {
      for (std::size_t i = 0; i < n; ++i) rows_[i] = i;
    }

    DecisionTree tree;
    tree.nodes.emplace_back();
    struct Pending {
      int node;
      std::size_t begin;
      std::size_t end;
      std::size_t depth;
      std::uint64_t key;  // seeds the node's own feature draw
    };
    std::vector<Pending> stack{{0, 0, n, 0, seed_}};
    while (!stack.empty()) {
      const Pending p = stack.back();
      stack.pop_back();

      double mass[2] = {0.0, 0.0};
      for (std::size_t k = p.begin; k < p.end; ++k) {
        const int label = y_[rows_[k]];
        mass[label] += weights_[label];
      }
      TreeNode& node = tree.nodes[p.node];
      node.mass[0] = mass[0];
      node.mass[1] = mass[1];
      node.vote = heavier_class(mass[0], mass[1], tie_class_);

      const bool pure = mass[0] == 0.0 || mass[1] == 0.0;
      const bool depth_capped = max_depth_ && p.depth >= *max_depth_;
      if (pure || depth_capped || p.end - p.begin < 2) continue;

      const auto split = best_split(p.begin, p.end, p.key);
      if (!split) continue;

      const auto [feature, threshold] = *split;
      const auto mid_it = std::stable_partition(
          rows_.begin() + static_cast<std::ptrdiff_t>(p.begin),
          rows_.begin() + static_cast<std::ptrdiff_t>(p.end),
          [&](std::size_t r) { return column(feature)[r] <= threshold; });
      const auto mid = static_cast<std::size_t>(mid_it - rows_.begin());

      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& parent = tree.nodes[p.node];
      parent.feature = static_cast<int>(feature);
      parent.threshold = threshold;
      parent.left = left;
      parent.right = left + 1;
      stack.push_back({left + 1, mid, p.end, p.depth + 1, derive_seed(p.key, {1})});
      stack.push_back({left, p.begin, mid, p.depth + 1, derive_seed(p.key, {0})});
    }
    return tree;
  }

 private:
  // Draws candidate features without replacement until `mtry` non-constant
  // ones have been scored (or the features run out). Returns the split with
  // the largest weighted Gini decrease; earlier candidates win exact ties.
  // Each node draws from its own stream keyed by its path from the root, so a
  // subtree does not depend on the order siblings are grown in and a depth
  // cap only truncates the unlimited tree.
  std::optional<std::pair<std::size_t, double>> best_split(std::size_t begin, std::size_t end,
                                                           std::uint64_t key) {
    const std::size_t d = pool_.size();
    for (std::size_t f = 0; f < d; ++f) pool_[f] = f;
    std::mt19937_64 node_rng(key);
    double best_score = -std::numeric_limits<double>::infinity();
    std::optional<std::pair<std::size_t, double>> best;
    std::size_t scored = 0;
    for (std::size_t k = 0; k < d && scored < mtry_; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, d - 1);
      std::swap(pool_[k], pool_[pick(node_rng)]);
      const std::size_t f = pool_[k];

      const double* col = column(f);
      scratch_.clear();
      for (std::size_t i = begin; i < end; ++i) scratch_.emplace_back(col[rows_[i]], y_[rows_[i]]);
      std::sort(scratch_.begin(), scratch_.end());
      if (scratch_.front().first == scratch_.back().first) continue;
      ++scored;

      const double w[2] = {weights_.negative, weights_.positive};
      double total[2] = {0.0, 0.0};
      for (const auto& [v, label] : scratch_) total[label] += w[label];
      double left[2] = {0.0, 0.0};
      for (std::size_t t = 0; t + 1 < scratch_.size(); ++t) {
        const int label = scratch_[t].second;
        left[label] += w[label];
        const double a = scratch_[t].first;
        const double b = scratch_[t + 1].first;
        if (!(a < b)) continue;
        const double right0 = total[0] - left[0];
        const double right1 = total[1] - left[1];
        const double wl = left[0] + left[1];
        const double wr = right0 + right1;
        // Maximising sum over children of (sum_c m_c^2) / W is equivalent to
        // minimising the mass-weighted Gini impurity of the children.
        const double score = (left[0] * left[0] + left[1] * left[1]) / wl +
                             (right0 * right0 + right1 * right1) / wr;
        if (score > best_score) {
          best_score = score;
          double thr = a / 2.0 + b / 2.0;
          if (!(thr < b)) thr = a;
          best = std::pair{f, thr};
        }
      }
    }
    return best;
  }

  const double* column(std::size_t f) const { return columns_.data() + f * n_rows_; }

  std::span<const double> columns_;
  std::size_t n_rows_;
  std::span<const int> y_;
  ClassWeights weights_;
  std::size_t mtry_;
  std::optional<std::size_t> max_depth_;
  int tie_class_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;  // bootstrap draw only
  std::vector<std::size_t> pool_;
  std::vector<std::size_t> rows_;
  std::vector<std::pair<double, int>> scratch_;  // (value, label)
};

}  // namespace

const TreeNode& DecisionTree::leaf_for(std::span<const double> x,
                                       std::optional<std::size_t> max_depth) const {
  const TreeNode* node = &nodes.front();
  for (std::size_t depth = 0; !node->is_leaf() && !(max_depth && depth >= *max_depth); ++depth) {
    node = &nodes[static_cast<std::size_t>(
        x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right)];
  }
  return *node;
}

std::size_t DecisionTree::depth() const {
  std::size_t deepest = 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [idx, d] = stack.back();
    stack.pop_back();
    const TreeNode& n = nodes[static_cast<std::size_t>(idx)];
    deepest = std::max(deepest, d);
    if (!n.is_leaf()) {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return deepest;
}

ForestModel train_forest(const Matrix& x, std::span<const int> y, const ClassWeights& weights,
                         const ForestParams& params) {
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::DimensionMismatch, "design matrix has " + std::to_string(x.rows()) +
                                                  " rows but " + std::to_string(y.size()) +
                                                  " labels");
  }
  if (params.n_trees < 1) throw Error(ErrorCode::InvalidParams, "n_trees must be at least 1");
  if (params.max_depth && *params.max_depth < 1) {
    throw Error(ErrorCode::InvalidParams, "max_depth must be positive");
  }
  if (x.cols() == 0) throw Error(ErrorCode::InvalidParams, "forest needs at least one feature");
  check_class_weights(weights);

  double total[2] = {0.0, 0.0};
  for (int label : y) {
    if (label != 0 && label != 1) throw Error(ErrorCode::InvalidParams, "labels must be 0 or 1");
    total[label] += weights[label];
  }
  if (total[0] == 0.0 || total[1] == 0.0) {
    throw Error(ErrorCode::SingleClassInput, "forest training needs both classes present");
  }

  ForestModel model;
  model.params = params;
  model.weights = weights;
  model.n_features = x.cols();
  model.features_per_split =
      params.features_per_split
          ? *params.features_per_split
          : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(x.cols()))));
  if (model.features_per_split < 1 || model.features_per_split > x.cols()) {
    throw Error(ErrorCode::InvalidParams, "features_per_split must lie in 1..d");
  }
  model.tie_class = heavier_class(total[0], total[1], 0);

  std::vector<double> columns(x.rows() * x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t f = 0; f < x.cols(); ++f) columns[f * x.rows() + r] = x(r, f);
  }
  model.trees.reserve(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    TreeBuilder builder(columns, x.rows(), y, weights, model.features_per_split, params.max_depth,
                        model.tie_class, derive_seed(params.seed, {t}));
    model.trees.push_back(builder.build(params.bootstrap));
  }
  return model;
}

std::size_t positive_votes(const ForestModel& model, std::span<const double> x,
                           std::optional<std::size_t> max_depth) {
  if (x.size() != model.n_features) {
    throw Error(ErrorCode::DimensionMismatch, "forest expects " +
                                                  std::to_string(model.n_features) +
                                                  " features, got " + std::to_string(x.size()));
  }
  std::size_t votes = 0;
  for (const DecisionTree& tree : model.trees) votes += tree.predict(x, max_depth) == 1 ? 1 : 0;
  return votes;
}

int predict(const ForestModel& model, std::span<const double> x,
            std::optional<std::size_t> max_depth) {
  const std::size_t pos = positive_votes(model, x, max_depth);
  const std::size_t neg = model.trees.size() - pos;
  if (pos > neg) return 1;
  if (neg > pos) return 0;
  return model.tie_class;
}

}  // namespace dyadic
