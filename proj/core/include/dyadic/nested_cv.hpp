#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dyadic/fusion.hpp"
#include "dyadic/grid.hpp"
#include "dyadic/metrics.hpp"
#include "dyadic/model.hpp"
#include "dyadic/standardizer.hpp"

namespace dyadic {

enum class SplitLevel { Outer, Inner };

// Emitted once per train/eval partition actually used. The couple lists are
// row-aligned (one entry per sample). `standardizer` holds the statistics the
// fit on that partition used.
struct SplitEvent {
  SplitLevel level = SplitLevel::Outer;
  std::size_t outer_fold = 0;
  std::size_t inner_fold = 0;  // meaningful for Inner only
  std::span<const std::string> train_couples;
  std::span<const std::string> eval_couples;
  const Standardizer* standardizer = nullptr;
};

// Called under an internal lock, so it need not be thread-safe itself.
using SplitObserver = std::function<void(const SplitEvent&)>;

struct CvOptions {
  std::size_t k_outer = 10;
  std::size_t k_inner = 5;
  std::uint64_t seed = 0;
  SvmOptions svm;
  std::size_t threads = 1;  // outer folds evaluated concurrently; 0 = all cores
  SplitObserver observer;
};

struct InnerSelection {
  std::size_t best_index = 0;
  Hyperparams best;
  // Mean inner balanced accuracy per grid point; empty when the point was
  // disqualified (no inner fold could be scored).
  std::vector<std::optional<double>> mean_scores;
  std::size_t folds_scored = 0;
};

// Couple-disjoint k_inner-fold CV over `train_rows` of `dm` for every grid
// point; returns the point with the highest mean balanced accuracy (first in
// grid order on ties). Inner folds whose train or eval side lacks a class are
// skipped. Standardization is refit on every inner training partition.
// Throws TooFewGroups, DegenerateInner (no fold scorable), InvalidParams.
InnerSelection inner_select(const DesignMatrix& dm, std::span<const std::size_t> train_rows,
                            const Grid& grid, const CvOptions& options, std::uint64_t seed,
                            std::size_t outer_fold = 0);

// Convenience form over every eligible sample of a corpus.
InnerSelection inner_select(const Corpus& corpus, Role role, FusionMode mode, const Grid& grid,
                            const CvOptions& options);

struct FoldResult {
  std::size_t fold = 0;
  std::size_t chosen_index = 0;
  Hyperparams chosen;
  bool inner_degenerate = false;  // inner search could not score any point; grid[0] used
  std::vector<std::optional<double>> inner_scores;
  std::size_t n_train = 0;
  std::size_t n_eval = 0;
  ConfusionMatrix confusion;
  std::optional<double> balanced_accuracy;  // empty when the eval fold lacks a class
};

struct EvalReport {
  Role role = Role::Male;
  FusionMode mode = FusionMode::Baseline;
  ModelFamily family = ModelFamily::LinearSvm;
  std::uint64_t seed = 0;
  std::size_t k_outer = 0;
  std::size_t k_inner = 0;
  std::size_t n_samples = 0;
  std::size_t n_negative = 0;
  std::size_t excluded_missing_partner = 0;
  std::vector<FoldResult> folds;
  ConfusionMatrix pooled;
  double pooled_balanced_accuracy = 0.0;
  double fold_mean = 0.0;  // over folds with a defined balanced accuracy
  double fold_sd = 0.0;    // sample standard deviation of the same
  std::size_t folds_scored = 0;
};

// For each outer fold: inner_select on the outer-train rows, refit the chosen
// point on all outer-train rows (fresh standardizer), predict the outer-eval
// rows. Predictions are pooled into one confusion matrix. Every split is
// checked for couple overlap. Deterministic for a fixed seed, regardless of
// thread count.
// Throws TooFewGroups, SingleClassInput, NonConvergenceError.
EvalReport nested_cv(const DesignMatrix& dm, ModelFamily family, const Grid& grid,
                     const CvOptions& options);
EvalReport nested_cv(const Corpus& corpus, Role role, FusionMode mode, ModelFamily family,
                     const Grid& grid, const CvOptions& options);

}  // namespace dyadic
