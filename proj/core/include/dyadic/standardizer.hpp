#pragma once

#include <span>
#include <vector>

#include "dyadic/matrix.hpp"

namespace dyadic {

// Per-feature z-scoring with statistics taken from a training partition.
// A feature with no spread in training is mapped to 0.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // population standard deviation; 0 marks a constant feature

  static Standardizer fit(const Matrix& train);

  std::size_t dim() const noexcept { return mean.size(); }

  Matrix transform(const Matrix& x) const;
  void transform_row(std::span<const double> in, std::span<double> out) const;

  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

}  // namespace dyadic
