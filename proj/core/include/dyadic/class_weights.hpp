#pragma once

#include <span>

namespace dyadic {

struct ClassWeights {
  double negative = 1.0;  // class 0
  double positive = 1.0;  // class 1

  double operator[](int label) const noexcept { return label == 0 ? negative : positive; }

  friend bool operator==(const ClassWeights&, const ClassWeights&) = default;
};

// "Balanced" weighting: w(c) = N / (2 * N_c).
// Throws Error(SingleClassInput) unless both classes occur.
ClassWeights compute_class_weights(std::span<const int> labels);

// Throws Error(InvalidParams) if a weight is not strictly positive and finite.
void check_class_weights(const ClassWeights& weights);

}  // namespace dyadic
