#include "dyadic/experiment.hpp"

#include <cstdint>
#include <mutex>

#include "dyadic/error.hpp"
#include "dyadic/parallel.hpp"

namespace dyadic {

const CellResult* ExperimentResult::find(Role role, FusionMode mode) const noexcept {
  for (const CellResult& c : cells) {
    if (c.role == role && c.mode == mode) return &c;
  }
  return nullptr;
}

std::optional<std::size_t> best_report(const std::vector<EvalReport>& reports) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (!best || reports[i].pooled_balanced_accuracy > reports[*best].pooled_balanced_accuracy) best = i;
  }
  return best;
}

ExperimentResult run_experiment_matrix(const Corpus& corpus, const ExperimentSpec& spec) {
  if (spec.families.empty() || spec.modes.empty() || spec.roles.empty()) {
    throw Error(ErrorCode::Config, "experiment needs at least one role, mode and family");
  }
  std::map<ModelFamily, Grid> grids;
  for (ModelFamily f : spec.families) {
    const auto it = spec.grids.find(f);
    grids[f] = it != spec.grids.end() ? it->second : default_grid(f);
    validate_grid(grids[f]);
  }

  ExperimentResult result;
  result.seed = spec.cv.seed;

  struct Task {
    std::size_t cell;
    std::size_t family;
  };
  std::vector<Task> tasks;
  std::vector<DesignMatrix> designs;
  std::vector<std::size_t> design_of_cell;

  for (Role role : spec.roles) {
    bool role_present = false;
    for (const DyadRecord& d : corpus.dyads) role_present = role_present || d.partner(role).has_value();
    for (FusionMode mode : spec.modes) {
      CellResult cell;
      cell.role = role;
      cell.mode = mode;
      if (!role_present) {
        cell.missing = "MissingRole";
      } else {
        try {
          designs.push_back(build_design_matrix(corpus, role, mode));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::EmptyDesignMatrix) throw;
          cell.missing = "MissingPartner";
        }
      }
      design_of_cell.push_back(cell.missing ? SIZE_MAX : designs.size() - 1);
      if (!cell.missing) {
        cell.reports.resize(spec.families.size());
        for (std::size_t f = 0; f < spec.families.size(); ++f) tasks.push_back({result.cells.size(), f});
      }
      result.cells.push_back(std::move(cell));
    }
  }

  CvOptions inner = spec.cv;
  inner.threads = 1;
  std::mutex observer_mutex;
  if (spec.cv.observer) {
    inner.observer = [&](const SplitEvent& e) {
      std::lock_guard lock(observer_mutex);
      spec.cv.observer(e);
    };
  }
  parallel_for(tasks.size(), spec.cv.threads, [&](std::size_t t) {
    const Task& task = tasks[t];
    const ModelFamily family = spec.families[task.family];
    result.cells[task.cell].reports[task.family] =
        nested_cv(designs[design_of_cell[task.cell]], family, grids.at(family), inner);
  });

  for (CellResult& cell : result.cells) cell.best = best_report(cell.reports);
  return result;
}

}  // namespace dyadic
