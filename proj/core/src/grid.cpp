#include "dyadic/grid.hpp"

#include <cmath>

#include "dyadic/error.hpp"

namespace dyadic {

Grid default_grid(ModelFamily family) {
  Grid grid;
  grid.family = family;
  constexpr double kCs[] = {0.1, 1.0, 10.0, 100.0};
  switch (family) {
    case ModelFamily::LinearSvm:
      for (double c : kCs) {
        Hyperparams hp;
        hp.c = c;
        grid.points.push_back(hp);
      }
      break;
    case ModelFamily::RbfSvm:
      for (double c : kCs) {
        for (double g : {0.1, 1.0, 10.0}) {
          Hyperparams hp;
          hp.c = c;
          hp.gamma_scale = g;
          grid.points.push_back(hp);
        }
      }
      break;
    case ModelFamily::RandomForest:
      for (std::optional<std::size_t> depth : {std::optional<std::size_t>{}, std::optional<std::size_t>{8}}) {
        Hyperparams hp;
        hp.n_trees = 100;
        hp.max_depth = depth;
        grid.points.push_back(hp);
      }
      break;
  }
  return grid;
}

void validate_grid(const Grid& grid) {
  if (grid.points.empty()) {
    throw Error(ErrorCode::InvalidParams,
                "grid for " + std::string(family_token(grid.family)) + " is empty");
  }
  for (const Hyperparams& hp : grid.points) {
    const std::string where = std::string(family_token(grid.family)) + " grid point " +
                              describe(grid.family, hp) + ": ";
    switch (grid.family) {
      case ModelFamily::RbfSvm:
        if (!(hp.gamma_scale > 0.0) || !std::isfinite(hp.gamma_scale)) {
          throw Error(ErrorCode::InvalidParams, where + "gamma scale must be positive");
        }
        [[fallthrough]];
      case ModelFamily::LinearSvm:
        if (!(hp.c > 0.0) || !std::isfinite(hp.c)) {
          throw Error(ErrorCode::InvalidParams, where + "C must be positive");
        }
        break;
      case ModelFamily::RandomForest:
        if (hp.n_trees < 1) throw Error(ErrorCode::InvalidParams, where + "n_trees must be >= 1");
        if (hp.max_depth && *hp.max_depth < 1) {
          throw Error(ErrorCode::InvalidParams, where + "max_depth must be >= 1");
        }
        if (hp.features_per_split && *hp.features_per_split < 1) {
          throw Error(ErrorCode::InvalidParams, where + "features_per_split must be >= 1");
        }
        break;
    }
  }
}

}  // namespace dyadic
