#include "dyadic/class_weights.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "dyadic/error.hpp"

namespace dyadic {

ClassWeights compute_class_weights(std::span<const int> labels) {
  std::size_t counts[2] = {0, 0};
  for (int y : labels) {
    if (y != 0 && y != 1) {
      throw Error(ErrorCode::InvalidParams, "labels must be 0 or 1, got " + std::to_string(y));
    }
    ++counts[y];
  }
  if (counts[0] == 0 || counts[1] == 0) {
    throw Error(ErrorCode::SingleClassInput, "class weights need both classes present");
  }
  const double n = static_cast<double>(labels.size());
  return ClassWeights{n / (2.0 * static_cast<double>(counts[0])),
                      n / (2.0 * static_cast<double>(counts[1]))};
}

void check_class_weights(const ClassWeights& weights) {
  for (double w : {weights.negative, weights.positive}) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::InvalidParams, "class weights must be positive and finite");
    }
  }
}

}  // namespace dyadic
