#pragma once

#include <vector>

#include "dyadic/model.hpp"

namespace dyadic {

// Candidate hyperparameters for one family, in canonical (tie-breaking) order.
struct Grid {
  ModelFamily family = ModelFamily::LinearSvm;
  std::vector<Hyperparams> points;
};

// Linear SVM: C in {0.1, 1, 10, 100}.
// RBF SVM:    C in {0.1, 1, 10, 100} x gamma scale in {0.1, 1, 10}, C-major.
// Forest:     100 trees, max depth in {unlimited, 8}, ceil(sqrt(d)) features per split.
Grid default_grid(ModelFamily family);

// Throws InvalidParams for an empty grid or a point violating a classifier
// precondition (C, gamma scale, tree count, depth).
void validate_grid(const Grid& grid);

}  // namespace dyadic
