#include "dyadic/nested_cv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>

#include "dyadic/error.hpp"
#include "dyadic/folds.hpp"
#include "dyadic/parallel.hpp"
#include "dyadic/rng.hpp"

namespace dyadic {

namespace {

// Seed-derivation tags, so every random sub-task draws from its own stream.
enum : std::uint64_t { kOuterPlan = 1, kInnerPlan = 2, kInnerForest = 3, kRefitForest = 4 };

std::vector<std::string> ids_of(const DesignMatrix& dm, std::span<const std::size_t> rows) {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(dm.couple_ids[r]);
  return out;
}

std::vector<int> labels_of(const DesignMatrix& dm, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(dm.labels[r]);
  return out;
}

bool has_both_classes(std::span<const int> labels) {
  bool seen[2] = {false, false};
  for (int y : labels) seen[y] = true;
  return seen[0] && seen[1];
}

void assert_disjoint(std::span<const std::string> train, std::span<const std::string> eval) {
  const std::set<std::string> train_set(train.begin(), train.end());
  for (const std::string& id : eval) {
    if (train_set.contains(id)) {
      throw Error(ErrorCode::Internal, "couple '" + id + "' appears on both sides of a split");
    }
  }
}

std::size_t distinct_count(std::span<const std::string> ids) {
  return std::set<std::string>(ids.begin(), ids.end()).size();
}

class Notifier {
 public:
  explicit Notifier(const SplitObserver& observer) : observer_(observer) {}

  void operator()(const SplitEvent& event) {
    if (!observer_) return;
    std::lock_guard lock(mutex_);
    observer_(event);
  }

 private:
  const SplitObserver& observer_;
  std::mutex mutex_;
};

// Balanced accuracy of every grid point on one split. Empty entries mean the
// split could not be scored (a side lacking a class).
std::vector<std::optional<double>> score_split(const DesignMatrix& dm, const Split& split,
                                               const Grid& grid, const CvOptions& options,
                                               std::uint64_t forest_seed,
                                               const std::function<void(const Standardizer&)>& on_fit) {
  std::vector<std::optional<double>> scores(grid.points.size());
  const auto y_train = labels_of(dm, split.train);
  const auto y_eval = labels_of(dm, split.eval);
  if (!has_both_classes(y_train) || !has_both_classes(y_eval)) return scores;

  const Matrix x_train = dm.features.select_rows(split.train);
  const Matrix x_eval = dm.features.select_rows(split.eval);
  const Standardizer st = Standardizer::fit(x_train);
  on_fit(st);
  const Matrix xs_train = st.transform(x_train);
  const Matrix xs_eval = st.transform(x_eval);
  const ClassWeights weights = compute_class_weights(y_train);

  auto score_of = [&](std::span<const int> predicted) {
    return balanced_accuracy(confusion(y_eval, predicted));
  };

  if (grid.family == ModelFamily::RandomForest) {
    // Points differing only in max_depth share one forest grown to the
    // deepest cap and are scored by truncated traversal.
    std::vector<bool> done(grid.points.size(), false);
    for (std::size_t g = 0; g < grid.points.size(); ++g) {
      if (done[g]) continue;
      const Hyperparams& hp = grid.points[g];
      std::vector<std::size_t> group;
      ForestParams fp;
      fp.n_trees = hp.n_trees;
      fp.features_per_split = hp.features_per_split;
      fp.max_depth = hp.max_depth;
      fp.seed = forest_seed;
      for (std::size_t h = g; h < grid.points.size(); ++h) {
        const Hyperparams& other = grid.points[h];
        if (done[h] || other.n_trees != hp.n_trees || other.features_per_split != hp.features_per_split) {
          continue;
        }
        group.push_back(h);
        done[h] = true;
        if (!other.max_depth || (fp.max_depth && *other.max_depth > *fp.max_depth)) {
          fp.max_depth = other.max_depth;
        }
      }
      const ForestModel forest = train_forest(xs_train, y_train, weights, fp);
      for (std::size_t h : group) {
        std::vector<int> predicted;
        predicted.reserve(xs_eval.rows());
        for (std::size_t i = 0; i < xs_eval.rows(); ++i) {
          predicted.push_back(predict(forest, xs_eval.row(i), grid.points[h].max_depth));
        }
        scores[h] = score_of(predicted);
      }
    }
    return scores;
  }

  // SVM families share one linear Gram matrix per split; the RBF kernel is
  // derived from it through |u - v|^2 = <u,u> + <v,v> - 2<u,v>.
  const Matrix gram = kernel_matrix(xs_train, Kernel::linear());
  const Matrix cross = cross_kernel_matrix(xs_eval, xs_train, Kernel::linear());
  std::vector<double> eval_norms(xs_eval.rows());
  for (std::size_t i = 0; i < xs_eval.rows(); ++i) eval_norms[i] = dot(xs_eval.row(i), xs_eval.row(i));

  const std::size_t n = xs_train.rows();
  std::map<double, std::pair<Matrix, Matrix>> rbf_kernels;  // gamma -> (train, cross)
  const double denominator = grid.family == ModelFamily::RbfSvm ? gamma_denominator(xs_train) : 1.0;
  for (std::size_t g = 0; g < grid.points.size(); ++g) {
    const Hyperparams& hp = grid.points[g];
    const Matrix* kt = &gram;
    const Matrix* kc = &cross;
    if (grid.family == ModelFamily::RbfSvm) {
      const double gamma = hp.gamma_scale / denominator;
      auto it = rbf_kernels.find(gamma);
      if (it == rbf_kernels.end()) {
        Matrix k_train(n, n);
        Matrix k_cross(xs_eval.rows(), n);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            const double d2 = i == j ? 0.0 : std::max(0.0, gram(i, i) + gram(j, j) - 2.0 * gram(i, j));
            k_train(i, j) = std::exp(-gamma * d2);
          }
        }
        for (std::size_t i = 0; i < k_cross.rows(); ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            const double d2 = std::max(0.0, eval_norms[i] + gram(j, j) - 2.0 * cross(i, j));
            k_cross(i, j) = std::exp(-gamma * d2);
          }
        }
        it = rbf_kernels.emplace(gamma, std::pair{std::move(k_train), std::move(k_cross)}).first;
      }
      kt = &it->second.first;
      kc = &it->second.second;
    }
    const DualSolution sol = solve_svm_dual(*kt, y_train, box_bounds(y_train, hp.c, weights), options.svm);
    const auto values = decision_values(sol, y_train, *kc);
    std::vector<int> predicted;
    predicted.reserve(values.size());
    for (double v : values) predicted.push_back(decision_to_label(v));
    scores[g] = score_of(predicted);
  }
  return scores;
}

InnerSelection inner_select_impl(const DesignMatrix& dm, std::span<const std::size_t> train_rows,
                                 const Grid& grid, const CvOptions& options, std::uint64_t seed,
                                 std::size_t outer_fold, Notifier& notify) {
  validate_grid(grid);
  if (options.k_inner < 2) throw Error(ErrorCode::InvalidParams, "k_inner must be at least 2");
  const auto train_ids = ids_of(dm, train_rows);
  const FoldPlan plan = plan_grouped_folds(train_ids, options.k_inner, seed);

  InnerSelection sel;
  sel.mean_scores.assign(grid.points.size(), std::nullopt);
  std::vector<double> sums(grid.points.size(), 0.0);
  std::vector<std::size_t> counts(grid.points.size(), 0);

  if (grid.points.size() == 1) {
    sel.best_index = 0;
    sel.best = grid.points.front();
    return sel;
  }

  for (std::size_t fold = 0; fold < options.k_inner; ++fold) {
    const Split split = split_rows(plan, fold, dm.couple_ids, train_rows);
    const auto tr_ids = ids_of(dm, split.train);
    const auto ev_ids = ids_of(dm, split.eval);
    assert_disjoint(tr_ids, ev_ids);
    auto on_fit = [&](const Standardizer& st) {
      notify(SplitEvent{SplitLevel::Inner, outer_fold, fold, tr_ids, ev_ids, &st});
    };
    const auto scores = score_split(dm, split, grid, options,
                                    derive_seed(seed, {kInnerForest, fold}), on_fit);
    bool any = false;
    for (std::size_t g = 0; g < scores.size(); ++g) {
      if (!scores[g]) continue;
      any = true;
      sums[g] += *scores[g];
      ++counts[g];
    }
    if (any) ++sel.folds_scored;
  }

  std::optional<std::size_t> best;
  for (std::size_t g = 0; g < grid.points.size(); ++g) {
    if (counts[g] == 0) continue;
    sel.mean_scores[g] = sums[g] / static_cast<double>(counts[g]);
    if (!best || *sel.mean_scores[g] > *sel.mean_scores[*best]) best = g;
  }
  if (!best) {
    throw Error(ErrorCode::DegenerateInner, "no inner fold had both classes on each side");
  }
  sel.best_index = *best;
  sel.best = grid.points[*best];
  return sel;
}

}  // namespace

InnerSelection inner_select(const DesignMatrix& dm, std::span<const std::size_t> train_rows,
                            const Grid& grid, const CvOptions& options, std::uint64_t seed,
                            std::size_t outer_fold) {
  Notifier notify(options.observer);
  return inner_select_impl(dm, train_rows, grid, options, seed, outer_fold, notify);
}

InnerSelection inner_select(const Corpus& corpus, Role role, FusionMode mode, const Grid& grid,
                            const CvOptions& options) {
  const DesignMatrix dm = build_design_matrix(corpus, role, mode);
  std::vector<std::size_t> rows(dm.labels.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return inner_select(dm, rows, grid, options, derive_seed(options.seed, {kInnerPlan}));
}

EvalReport nested_cv(const DesignMatrix& dm, ModelFamily family, const Grid& grid,
                     const CvOptions& options) {
  if (grid.family != family) throw Error(ErrorCode::InvalidParams, "grid family does not match");
  validate_grid(grid);
  if (options.k_outer < 2) throw Error(ErrorCode::InvalidParams, "k_outer must be at least 2");
  if (!has_both_classes(dm.labels)) {
    throw Error(ErrorCode::SingleClassInput, std::string(role_name(dm.role)) + " " +
                                                 std::string(fusion_token(dm.mode)) +
                                                 " samples carry a single class");
  }

  const FoldPlan outer = plan_grouped_folds(dm.couple_ids, options.k_outer,
                                            derive_seed(options.seed, {kOuterPlan}));
  EvalReport report;
  report.role = dm.role;
  report.mode = dm.mode;
  report.family = family;
  report.seed = options.seed;
  report.k_outer = options.k_outer;
  report.k_inner = options.k_inner;
  report.n_samples = dm.labels.size();
  report.n_negative = static_cast<std::size_t>(std::count(dm.labels.begin(), dm.labels.end(), 0));
  report.excluded_missing_partner = dm.excluded_missing_partner;
  report.folds.resize(options.k_outer);

  Notifier notify(options.observer);
  parallel_for(options.k_outer, options.threads, [&](std::size_t f) {
    const Split split = split_rows(outer, f, dm.couple_ids, {});
    const auto tr_ids = ids_of(dm, split.train);
    const auto ev_ids = ids_of(dm, split.eval);
    assert_disjoint(tr_ids, ev_ids);
    const auto y_train = labels_of(dm, split.train);
    const auto y_eval = labels_of(dm, split.eval);
    if (!has_both_classes(y_train)) {
      throw Error(ErrorCode::SingleClassInput,
                  "outer fold " + std::to_string(f) + " training partition has a single class");
    }
    if (distinct_count(tr_ids) < options.k_inner) {
      throw Error(ErrorCode::TooFewGroups, "outer fold " + std::to_string(f) +
                                               " leaves too few couples for inner CV");
    }

    FoldResult& result = report.folds[f];
    result.fold = f;
    result.n_train = split.train.size();
    result.n_eval = split.eval.size();
    try {
      const InnerSelection sel = inner_select_impl(
          dm, split.train, grid, options, derive_seed(options.seed, {kInnerPlan, f}), f, notify);
      result.chosen_index = sel.best_index;
      result.chosen = sel.best;
      result.inner_scores = sel.mean_scores;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateInner) throw;
      result.inner_degenerate = true;
      result.chosen_index = 0;
      result.chosen = grid.points.front();
      result.inner_scores.assign(grid.points.size(), std::nullopt);
    }

    FitOptions fit;
    fit.svm = options.svm;
    fit.seed = derive_seed(options.seed, {kRefitForest, f});
    const Matrix x_train = dm.features.select_rows(split.train);
    const TrainedModel model = fit_model(family, result.chosen, x_train, y_train, fit);
    notify(SplitEvent{SplitLevel::Outer, f, 0, tr_ids, ev_ids, &model.standardizer});

    const auto predicted = predict(model, dm.features.select_rows(split.eval));
    result.confusion = confusion(y_eval, predicted);
    if (has_both_classes(y_eval)) result.balanced_accuracy = balanced_accuracy(result.confusion);
  });

  std::vector<double> fold_scores;
  for (const FoldResult& r : report.folds) {
    report.pooled += r.confusion;
    if (r.balanced_accuracy) fold_scores.push_back(*r.balanced_accuracy);
  }
  report.pooled_balanced_accuracy = balanced_accuracy(report.pooled);
  report.folds_scored = fold_scores.size();
  if (!fold_scores.empty()) {
    double sum = 0.0;
    for (double s : fold_scores) sum += s;
    report.fold_mean = sum / static_cast<double>(fold_scores.size());
    if (fold_scores.size() > 1) {
      double ss = 0.0;
      for (double s : fold_scores) ss += (s - report.fold_mean) * (s - report.fold_mean);
      report.fold_sd = std::sqrt(ss / static_cast<double>(fold_scores.size() - 1));
    }
  }
  return report;
}

EvalReport nested_cv(const Corpus& corpus, Role role, FusionMode mode, ModelFamily family,
                     const Grid& grid, const CvOptions& options) {
  return nested_cv(build_design_matrix(corpus, role, mode), family, grid, options);
}

}  // namespace dyadic
