#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dyadic/nested_cv.hpp"

namespace dyadic {

struct ExperimentSpec {
  std::vector<Role> roles{Role::Male, Role::Female};
  std::vector<FusionMode> modes{kFusionModes.begin(), kFusionModes.end()};
  std::vector<ModelFamily> families{kModelFamilies.begin(), kModelFamilies.end()};
  std::map<ModelFamily, Grid> grids;  // default_grid for any family not listed
  CvOptions cv;                       // cv.threads spreads (cell, family) tasks
};

// One (role, fusion mode) cell of the results table.
struct CellResult {
  Role role = Role::Male;
  FusionMode mode = FusionMode::Baseline;
  std::vector<EvalReport> reports;  // in spec.families order
  std::optional<std::size_t> best;  // index into reports; first family wins ties
  // Set when the cell could not be evaluated at all ("MissingRole" when the
  // corpus has no records of the role).
  std::optional<std::string> missing;
};

struct ExperimentResult {
  std::uint64_t seed = 0;
  std::vector<CellResult> cells;  // role-major, then spec.modes order

  const CellResult* find(Role role, FusionMode mode) const noexcept;
};

// Index of the highest pooled balanced accuracy (first on ties).
std::optional<std::size_t> best_report(const std::vector<EvalReport>& reports);

// Runs nested_cv for every role x mode x family. A role without any records
// yields cells marked "MissingRole"; other errors propagate.
ExperimentResult run_experiment_matrix(const Corpus& corpus, const ExperimentSpec& spec);

}  // namespace dyadic
