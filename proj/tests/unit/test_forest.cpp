#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "dyadic/error.hpp"
#include "dyadic/forest.hpp"
#include "test_support.hpp"

using namespace dyadic;
using dyadic::testing::random_matrix;

namespace {

struct Blobs {
  Matrix x;
  std::vector<int> y;
};

Blobs blobs(std::size_t per_class, double sep, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Blobs b{random_matrix(2 * per_class, 4, rng), std::vector<int>(2 * per_class)};
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    b.y[i] = i < per_class ? 0 : 1;
    for (std::size_t j = 0; j < 4; ++j) b.x(i, j) += b.y[i] == 1 ? sep : -sep;
  }
  return b;
}

}  // namespace

TEST(Forest, MemorizesDistinctPointsWithoutBootstrap) {
  std::mt19937_64 rng(1);
  const Matrix x = random_matrix(40, 3, rng);
  std::vector<int> y(40);
  for (auto& v : y) v = std::bernoulli_distribution(0.4)(rng);
  y[0] = 0;
  y[1] = 1;
  ForestParams p;
  p.n_trees = 5;
  p.bootstrap = false;
  p.features_per_split = 3;
  const ForestModel m = train_forest(x, y, {1.0, 1.0}, p);
  for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(predict(m, x.row(i)), y[i]);
}

TEST(Forest, DeterministicForFixedSeed) {
  const Blobs b = blobs(30, 0.5, 2);
  ForestParams p;
  p.n_trees = 15;
  p.seed = 99;
  EXPECT_EQ(train_forest(b.x, b.y, {1.0, 1.0}, p), train_forest(b.x, b.y, {1.0, 1.0}, p));
  ForestParams q = p;
  q.seed = 100;
  EXPECT_NE(train_forest(b.x, b.y, {1.0, 1.0}, p).trees, train_forest(b.x, b.y, {1.0, 1.0}, q).trees);
}

TEST(Forest, SeparatesBlobsLikeNearestCentroid) {
  const Blobs train = blobs(100, 1.0, 3);
  const Blobs test = blobs(200, 1.0, 4);
  ForestParams p;
  p.n_trees = 50;
  p.seed = 1;
  const ForestModel m = train_forest(train.x, train.y, {1.0, 1.0}, p);

  // Oracle: nearest class centroid from the training set.
  std::vector<double> c0(4, 0.0);
  std::vector<double> c1(4, 0.0);
  for (std::size_t i = 0; i < train.x.rows(); ++i) {
    for (std::size_t j = 0; j < 4; ++j) (train.y[i] ? c1 : c0)[j] += train.x(i, j) / 100.0;
  }
  std::size_t forest_ok = 0;
  std::size_t oracle_ok = 0;
  for (std::size_t i = 0; i < test.x.rows(); ++i) {
    forest_ok += predict(m, test.x.row(i)) == test.y[i];
    const int nc = squared_distance(test.x.row(i), c1) < squared_distance(test.x.row(i), c0) ? 1 : 0;
    oracle_ok += nc == test.y[i];
  }
  const double n = static_cast<double>(test.x.rows());
  EXPECT_GE(forest_ok / n, 0.95);
  EXPECT_GE(forest_ok / n, oracle_ok / n - 0.03);
}

TEST(Forest, VoteTieGoesToTieClass) {
  // Two single-feature stumps that disagree on the query point.
  ForestModel m;
  m.n_features = 1;
  m.tie_class = 0;
  DecisionTree t0;
  t0.nodes.push_back({-1, 0.0, -1, -1, {1.0, 0.0}, 0});
  DecisionTree t1;
  t1.nodes.push_back({-1, 0.0, -1, -1, {0.0, 1.0}, 1});
  m.trees = {t0, t1};
  const std::vector<double> x{0.0};
  EXPECT_EQ(positive_votes(m, x), 1u);
  EXPECT_EQ(predict(m, x), 0);
  m.tie_class = 1;
  EXPECT_EQ(predict(m, x), 1);
}

TEST(Forest, TieClassIsHeavierTotalWeight) {
  const Blobs b = blobs(10, 1.0, 5);
  ForestParams p;
  p.n_trees = 3;
  EXPECT_EQ(train_forest(b.x, b.y, {1.0, 1.0}, p).tie_class, 0);
  EXPECT_EQ(train_forest(b.x, b.y, {1.0, 2.0}, p).tie_class, 1);
}

TEST(Forest, TreeOrderCarriesNoInformation) {
  const Blobs b = blobs(25, 0.3, 6);
  ForestParams p;
  p.n_trees = 21;
  p.seed = 4;
  ForestModel m = train_forest(b.x, b.y, {1.0, 1.0}, p);
  const Blobs test = blobs(50, 0.3, 7);
  std::vector<int> before;
  for (std::size_t i = 0; i < test.x.rows(); ++i) before.push_back(predict(m, test.x.row(i)));
  std::mt19937_64 rng(8);
  std::shuffle(m.trees.begin(), m.trees.end(), rng);
  for (std::size_t i = 0; i < test.x.rows(); ++i) EXPECT_EQ(predict(m, test.x.row(i)), before[i]);
}

TEST(Forest, DepthCapTruncatesTheUnlimitedTree) {
  const Blobs b = blobs(40, 0.2, 9);
  const Blobs test = blobs(60, 0.2, 10);
  for (std::size_t cap : {1u, 2u, 3u, 8u}) {
    ForestParams unlimited;
    unlimited.n_trees = 7;
    unlimited.seed = 12;
    ForestParams capped = unlimited;
    capped.max_depth = cap;
    const ForestModel full = train_forest(b.x, b.y, {1.0, 1.5}, unlimited);
    const ForestModel cut = train_forest(b.x, b.y, {1.0, 1.5}, capped);
    for (const DecisionTree& t : cut.trees) EXPECT_LE(t.depth(), cap);
    for (std::size_t i = 0; i < test.x.rows(); ++i) {
      EXPECT_EQ(predict(full, test.x.row(i), cap), predict(cut, test.x.row(i)));
      EXPECT_EQ(positive_votes(full, test.x.row(i), cap), positive_votes(cut, test.x.row(i)));
    }
  }
}

TEST(Forest, NodeInvariants) {
  const Blobs b = blobs(30, 0.2, 11);
  ForestParams p;
  p.n_trees = 10;
  p.bootstrap = false;
  const ClassWeights w{2.0, 0.5};
  const ForestModel m = train_forest(b.x, b.y, w, p);
  EXPECT_EQ(m.features_per_split, 2u);  // ceil(sqrt(4))
  for (const DecisionTree& t : m.trees) {
    EXPECT_DOUBLE_EQ(t.nodes[0].mass[0], 30 * 2.0);
    EXPECT_DOUBLE_EQ(t.nodes[0].mass[1], 30 * 0.5);
    for (const TreeNode& n : t.nodes) {
      if (n.is_leaf()) continue;
      const TreeNode& l = t.nodes[static_cast<std::size_t>(n.left)];
      const TreeNode& r = t.nodes[static_cast<std::size_t>(n.right)];
      EXPECT_NEAR(l.mass[0] + r.mass[0], n.mass[0], 1e-9);
      EXPECT_NEAR(l.mass[1] + r.mass[1], n.mass[1], 1e-9);
      EXPECT_GT(l.mass[0] + l.mass[1], 0.0);
      EXPECT_GT(r.mass[0] + r.mass[1], 0.0);
      EXPECT_NE(n.mass[0] == 0.0 || n.mass[1] == 0.0, true);  // pure nodes are leaves
    }
  }
}

TEST(Forest, Preconditions) {
  const Blobs b = blobs(5, 1.0, 12);
  ForestParams p;
  p.n_trees = 0;
  EXPECT_THROW(train_forest(b.x, b.y, {1.0, 1.0}, p), Error);
  p.n_trees = 2;
  p.max_depth = 0;
  EXPECT_THROW(train_forest(b.x, b.y, {1.0, 1.0}, p), Error);
  p.max_depth.reset();
  p.features_per_split = 5;
  EXPECT_THROW(train_forest(b.x, b.y, {1.0, 1.0}, p), Error);
  p.features_per_split.reset();
  EXPECT_THROW(train_forest(b.x, std::vector<int>(10, 1), {1.0, 1.0}, p), Error);
  const ForestModel m = train_forest(b.x, b.y, {1.0, 1.0}, p);
  EXPECT_THROW(predict(m, std::vector<double>{1.0}), Error);
}
