#include "dyadic/standardizer.hpp"

#include <cmath>

#include "dyadic/error.hpp"

namespace dyadic {

Standardizer Standardizer::fit(const Matrix& train) {
  if (train.empty()) throw Error(ErrorCode::InvalidParams, "cannot standardize an empty matrix");
  const std::size_t n = train.rows();
  const std::size_t d = train.cols();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = train.row(i);
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
  }
  for (double& m : s.mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = train.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double c = r[j] - s.mean[j];
      s.scale[j] += c * c;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(s.scale[j] / static_cast<double>(n));
    // Spread that is pure rounding noise around a constant counts as none.
    s.scale[j] = sd > 1e-12 * (1.0 + std::abs(s.mean[j])) ? sd : 0.0;
  }
  return s;
}

void Standardizer::transform_row(std::span<const double> in, std::span<double> out) const {
  if (in.size() != dim() || out.size() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "standardizer expects " + std::to_string(dim()) +
                                                  " features, got " + std::to_string(in.size()));
  }
  for (std::size_t j = 0; j < in.size(); ++j) {
    out[j] = scale[j] > 0.0 ? (in[j] - mean[j]) / scale[j] : 0.0;
  }
}

Matrix Standardizer::transform(const Matrix& x) const {
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) transform_row(x.row(i), out.row(i));
  return out;
}

}  // namespace dyadic
