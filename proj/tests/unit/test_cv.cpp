#include <cmath>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dyadic/error.hpp"
#include "dyadic/experiment.hpp"
#include "dyadic/nested_cv.hpp"
#include "dyadic/report.hpp"
#include "dyadic/synth.hpp"

using namespace dyadic;

namespace {

SynthParams small_params(std::size_t couples, double self_signal, std::uint64_t seed) {
  SynthParams p;
  p.n_couples = couples;
  p.negative_rate_male = 0.3;
  p.negative_rate_female = 0.3;
  p.self_signal = self_signal;
  p.effect_size = 1.0;
  p.dropout_male = 0.05;
  p.dropout_female = 0.05;
  p.seed = seed;
  return p;
}

Grid linear_grid(std::vector<double> cs) {
  Grid g{ModelFamily::LinearSvm, {}};
  for (double c : cs) {
    Hyperparams h;
    h.c = c;
    g.points.push_back(h);
  }
  return g;
}

CvOptions small_cv(std::uint64_t seed) {
  CvOptions o;
  o.k_outer = 5;
  o.k_inner = 3;
  o.seed = seed;
  return o;
}

}  // namespace

TEST(NestedCv, PlantedSignalIsRecovered) {
  const Corpus c = generate_corpus(small_params(120, 1.0, 3));
  const EvalReport r =
      nested_cv(c, Role::Male, FusionMode::Baseline, ModelFamily::LinearSvm, linear_grid({0.1, 1.0}), small_cv(1));
  EXPECT_GE(r.pooled_balanced_accuracy, 0.95);
  EXPECT_EQ(r.folds.size(), 5u);
  EXPECT_EQ(r.pooled.total(), r.n_samples);
  std::size_t eval_total = 0;
  for (const auto& f : r.folds) eval_total += f.n_eval;
  EXPECT_EQ(eval_total, r.n_samples);
}

TEST(NestedCv, DeterministicAndThreadInvariant) {
  const Corpus c = generate_corpus(small_params(80, 0.3, 4));
  CvOptions one = small_cv(7);
  CvOptions many = small_cv(7);
  many.threads = 3;
  const Grid g = default_grid(ModelFamily::RbfSvm);
  const auto a = to_json(nested_cv(c, Role::Female, FusionMode::WithPartnerParalinguistic, ModelFamily::RbfSvm, g, one));
  const auto b = to_json(nested_cv(c, Role::Female, FusionMode::WithPartnerParalinguistic, ModelFamily::RbfSvm, g, one));
  const auto d = to_json(nested_cv(c, Role::Female, FusionMode::WithPartnerParalinguistic, ModelFamily::RbfSvm, g, many));
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a.dump(), d.dump());
}

TEST(NestedCv, SplitsAreCoupleDisjointAndStandardizedOnTrainOnly) {
  const Corpus c = generate_corpus(small_params(60, 0.5, 5));
  const DesignMatrix dm = build_design_matrix(c, Role::Male, FusionMode::WithPartnerBoth);
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < dm.couple_ids.size(); ++i) row_of[dm.couple_ids[i]] = i;

  std::size_t outer_events = 0;
  std::size_t inner_events = 0;
  CvOptions o = small_cv(2);
  o.observer = [&](const SplitEvent& e) {
    (e.level == SplitLevel::Outer ? outer_events : inner_events)++;
    const std::set<std::string> train(e.train_couples.begin(), e.train_couples.end());
    for (const auto& id : e.eval_couples) EXPECT_EQ(train.count(id), 0u) << id;
    ASSERT_NE(e.standardizer, nullptr);
    // Independent mean of a few columns over the training rows only.
    for (std::size_t col : {0u, 500u, 1887u}) {
      double mean = 0.0;
      for (const auto& id : e.train_couples) mean += dm.features(row_of.at(id), col);
      mean /= static_cast<double>(e.train_couples.size());
      EXPECT_NEAR(e.standardizer->mean[col], mean, 1e-12);
    }
  };
  nested_cv(dm, ModelFamily::LinearSvm, linear_grid({1.0, 10.0}), o);
  EXPECT_EQ(outer_events, 5u);
  EXPECT_EQ(inner_events, 5u * 3u);  // one standardizer per split, shared by grid points
}

TEST(NestedCv, TooFewCouples) {
  const Corpus c = generate_corpus(small_params(4, 0.5, 1));
  CvOptions o;
  EXPECT_THROW(nested_cv(c, Role::Male, FusionMode::Baseline, ModelFamily::LinearSvm, linear_grid({1.0}), o), Error);
}

TEST(InnerSelect, SinglePointAndTies) {
  const Corpus c = generate_corpus(small_params(60, 0.5, 6));
  const InnerSelection one = inner_select(c, Role::Male, FusionMode::Baseline, linear_grid({1.0}), small_cv(1));
  EXPECT_EQ(one.best_index, 0u);
  EXPECT_EQ(one.mean_scores.size(), 1u);

  const InnerSelection tie = inner_select(c, Role::Male, FusionMode::Baseline, linear_grid({1.0, 1.0}), small_cv(1));
  EXPECT_EQ(tie.best_index, 0u);
  EXPECT_EQ(tie.mean_scores[0], tie.mean_scores[1]);
}

TEST(InnerSelect, PicksTheArgmax) {
  const Corpus c = generate_corpus(small_params(80, 0.2, 8));
  const InnerSelection s = inner_select(c, Role::Female, FusionMode::Baseline,
                                        default_grid(ModelFamily::RbfSvm), small_cv(3));
  ASSERT_EQ(s.mean_scores.size(), 12u);
  for (std::size_t i = 0; i < s.mean_scores.size(); ++i) {
    if (!s.mean_scores[i]) continue;
    EXPECT_LE(*s.mean_scores[i], *s.mean_scores[s.best_index]);
    if (i < s.best_index) EXPECT_LT(*s.mean_scores[i], *s.mean_scores[s.best_index]);
  }
  EXPECT_EQ(s.best, default_grid(ModelFamily::RbfSvm).points[s.best_index]);
}

TEST(InnerSelect, SmallCUnderfitsSeparableData) {
  // Feature 0 separates the classes with a 0.1 gap; feature 1 is noise.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  DesignMatrix dm;
  dm.features = Matrix(60, 2);
  for (std::size_t i = 0; i < 60; ++i) {
    const int y = i % 3 == 0 ? 0 : 1;
    dm.labels.push_back(y);
    dm.couple_ids.push_back("c" + std::to_string(100 + i));
    dm.features(i, 0) = (y ? 1.0 : -1.0) * (0.05 + 0.3 * std::abs(normal(rng)));
    dm.features(i, 1) = 3.0 * normal(rng);
  }
  std::vector<std::size_t> rows(60);
  for (std::size_t i = 0; i < 60; ++i) rows[i] = i;
  CvOptions o;
  const InnerSelection s = inner_select(dm, rows, linear_grid({0.01, 10.0}), o, 1);
  ASSERT_TRUE(s.mean_scores[0] && s.mean_scores[1]);
  EXPECT_DOUBLE_EQ(*s.mean_scores[1], 1.0);
  EXPECT_LT(*s.mean_scores[0], *s.mean_scores[1]);
  EXPECT_EQ(s.best_index, 1u);
}

TEST(Experiment, MissingRoleCells) {
  Corpus c = generate_corpus(small_params(40, 0.5, 10));
  for (auto& d : c.dyads) d.female.reset();
  ExperimentSpec spec;
  spec.modes = {FusionMode::Baseline};
  spec.families = {ModelFamily::LinearSvm};
  spec.grids[ModelFamily::LinearSvm] = linear_grid({1.0});
  spec.cv = small_cv(1);
  const ExperimentResult r = run_experiment_matrix(c, spec);
  const CellResult* f = r.find(Role::Female, FusionMode::Baseline);
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(f->missing, std::optional<std::string>("MissingRole"));
  const CellResult* m = r.find(Role::Male, FusionMode::Baseline);
  ASSERT_NE(m, nullptr);
  EXPECT_FALSE(m->missing);
  EXPECT_EQ(m->reports.size(), 1u);
}

TEST(Experiment, BestReportIsFirstMaximum) {
  std::vector<EvalReport> reports(3);
  reports[0].pooled_balanced_accuracy = 0.6;
  reports[1].pooled_balanced_accuracy = 0.7;
  reports[2].pooled_balanced_accuracy = 0.7;
  EXPECT_EQ(best_report(reports), std::optional<std::size_t>(1));
  EXPECT_FALSE(best_report({}).has_value());
}

TEST(Experiment, CellWinnerIsMaxAcrossFamilies) {
  const Corpus c = generate_corpus(small_params(50, 0.4, 11));
  ExperimentSpec spec;
  spec.roles = {Role::Female};
  spec.modes = {FusionMode::Baseline, FusionMode::WithPartnerLinguistic};
  spec.grids[ModelFamily::RandomForest] = Grid{ModelFamily::RandomForest, {Hyperparams{1.0, 1.0, 10, 4, std::nullopt}}};
  spec.cv = small_cv(2);
  const ExperimentResult r = run_experiment_matrix(c, spec);
  ASSERT_EQ(r.cells.size(), 2u);
  for (const CellResult& cell : r.cells) {
    ASSERT_EQ(cell.reports.size(), 3u);
    ASSERT_TRUE(cell.best);
    for (const EvalReport& rep : cell.reports) {
      EXPECT_LE(rep.pooled_balanced_accuracy, cell.reports[*cell.best].pooled_balanced_accuracy);
    }
  }
}

TEST(ReportSet, AddCollectsAxesAndMedians) {
  auto make = [](std::uint64_t seed, ModelFamily f, double ba) {
    EvalReport r;
    r.role = Role::Female;
    r.mode = FusionMode::WithPartnerBoth;
    r.family = f;
    r.seed = seed;
    r.pooled_balanced_accuracy = ba;
    return r;
  };
  ReportSet set;
  const double lin[] = {0.6, 0.9, 0.7};
  const double rbf[] = {0.8, 0.5, 0.65};
  for (std::uint64_t s = 1; s <= 3; ++s) {
    ExperimentResult res;
    res.seed = s;
    CellResult cell;
    cell.role = Role::Female;
    cell.mode = FusionMode::WithPartnerBoth;
    cell.reports = {make(s, ModelFamily::LinearSvm, lin[s - 1]), make(s, ModelFamily::RbfSvm, rbf[s - 1])};
    res.cells.push_back(cell);
    set.add(res);
  }
  EXPECT_EQ(set.roles, std::vector<Role>{Role::Female});
  EXPECT_EQ(set.modes, std::vector<FusionMode>{FusionMode::WithPartnerBoth});
  EXPECT_EQ(set.families, (std::vector<ModelFamily>{ModelFamily::LinearSvm, ModelFamily::RbfSvm}));
  EXPECT_EQ(set.seeds.size(), 3u);
  const TableCell cell = summarize_cell(set, Role::Female, FusionMode::WithPartnerBoth);
  ASSERT_TRUE(cell.value);
  EXPECT_DOUBLE_EQ(*cell.value, 0.7);
  EXPECT_EQ(*cell.family, ModelFamily::LinearSvm);
}
