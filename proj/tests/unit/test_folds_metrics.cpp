#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "dyadic/error.hpp"
#include "dyadic/folds.hpp"
#include "dyadic/metrics.hpp"

using namespace dyadic;

namespace {

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("c" + std::to_string(i));
  return out;
}

}  // namespace

TEST(Folds, TenCouplesTenFolds) {
  const auto plan = plan_grouped_folds(ids(10), 10, 3);
  EXPECT_EQ(plan.fold_sizes(), std::vector<std::size_t>(10, 1));
}

TEST(Folds, SizesDifferByAtMostOne) {
  auto sizes = plan_grouped_folds(ids(23), 10, 1).fold_sizes();
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 3, 3, 2, 2, 2, 2, 2, 2, 2}));
}

TEST(Folds, TooFewGroups) {
  try {
    plan_grouped_folds(ids(4), 5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewGroups);
  }
  EXPECT_THROW(plan_grouped_folds(ids(4), 0, 1), Error);
}

TEST(Folds, DuplicatesCollapseAndSplitsAreDisjoint) {
  std::vector<std::string> rows;
  for (const auto& id : ids(30)) {
    rows.push_back(id);
    rows.push_back(id);  // both partners
  }
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const FoldPlan plan = plan_grouped_folds(rows, 7, seed);
    EXPECT_EQ(plan.assignments.size(), 30u);
    std::size_t eval_total = 0;
    for (std::size_t f = 0; f < 7; ++f) {
      const Split s = split_rows(plan, f, rows, {});
      std::set<std::string> train;
      for (auto r : s.train) train.insert(rows[r]);
      for (auto r : s.eval) {
        EXPECT_EQ(train.count(rows[r]), 0u);
        EXPECT_EQ(plan.fold_of(rows[r]), f);
      }
      EXPECT_EQ(s.train.size() + s.eval.size(), rows.size());
      eval_total += s.eval.size();
    }
    EXPECT_EQ(eval_total, rows.size());
  }
}

TEST(Folds, SeedChangesAssignment) {
  const auto a = plan_grouped_folds(ids(50), 5, 1);
  EXPECT_EQ(a.assignments, plan_grouped_folds(ids(50), 5, 1).assignments);
  EXPECT_NE(a.assignments, plan_grouped_folds(ids(50), 5, 2).assignments);
  EXPECT_THROW(a.fold_of("nobody"), Error);
}

TEST(Folds, RestrictedRows) {
  const auto rows = ids(20);
  const FoldPlan plan = plan_grouped_folds(rows, 4, 9);
  const std::vector<std::size_t> subset{0, 2, 4, 6, 8};
  const Split s = split_rows(plan, 1, rows, subset);
  EXPECT_EQ(s.train.size() + s.eval.size(), subset.size());
  for (auto r : s.train) EXPECT_EQ(r % 2, 0u);
}

TEST(Metrics, HandExamples) {
  ConfusionMatrix perfect;
  perfect.counts = {{{10, 0}, {0, 10}}};
  EXPECT_DOUBLE_EQ(balanced_accuracy(perfect), 1.0);
  ConfusionMatrix mixed;
  mixed.counts = {{{6, 4}, {2, 8}}};
  EXPECT_DOUBLE_EQ(balanced_accuracy(mixed), 0.7);
  ConfusionMatrix all_positive;
  all_positive.counts = {{{0, 32}, {0, 309}}};
  EXPECT_DOUBLE_EQ(balanced_accuracy(all_positive), 0.5);
}

TEST(Metrics, UndefinedRecall) {
  ConfusionMatrix cm;
  cm.counts = {{{0, 0}, {3, 4}}};
  try {
    balanced_accuracy(cm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UndefinedRecall);
  }
}

TEST(Metrics, ConfusionFromLabels) {
  const std::vector<int> t{0, 0, 1, 1, 1};
  const std::vector<int> p{0, 1, 1, 1, 0};
  const ConfusionMatrix cm = confusion(t, p);
  EXPECT_EQ(cm.counts[0][0], 1u);
  EXPECT_EQ(cm.counts[0][1], 1u);
  EXPECT_EQ(cm.counts[1][1], 2u);
  EXPECT_EQ(cm.counts[1][0], 1u);
  EXPECT_EQ(cm.total(), 5u);
  EXPECT_THROW(confusion(t, std::vector<int>{0}), Error);
  ConfusionMatrix sum = cm;
  sum += cm;
  EXPECT_EQ(sum.total(), 10u);
}

TEST(Metrics, MeanRecallIdentityOnRandomMatrices) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> count(0, 500);
  for (int i = 0; i < 1000; ++i) {
    ConfusionMatrix cm;
    cm.counts = {{{count(rng), count(rng)}, {count(rng), count(rng)}}};
    if (cm.true_count(0) == 0 || cm.true_count(1) == 0) continue;
    const double r0 = static_cast<double>(cm.counts[0][0]) / static_cast<double>(cm.counts[0][0] + cm.counts[0][1]);
    const double r1 = static_cast<double>(cm.counts[1][1]) / static_cast<double>(cm.counts[1][0] + cm.counts[1][1]);
    EXPECT_DOUBLE_EQ(balanced_accuracy(cm), (r0 + r1) / 2.0);
  }
}
