#include "dyadic/metrics.hpp"

#include "dyadic/error.hpp"

namespace dyadic {

std::size_t ConfusionMatrix::total() const noexcept {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) noexcept {
  for (int t = 0; t < 2; ++t) {
    for (int p = 0; p < 2; ++p) counts[t][p] += other.counts[t][p];
  }
  return *this;
}

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::DimensionMismatch, "truth and prediction lengths differ");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

double balanced_accuracy(const ConfusionMatrix& cm) {
  const std::size_t n0 = cm.true_count(0);
  const std::size_t n1 = cm.true_count(1);
  if (n0 == 0 || n1 == 0) {
    throw Error(ErrorCode::UndefinedRecall, "balanced accuracy needs samples of both true classes");
  }
  const double recall0 = static_cast<double>(cm.counts[0][0]) / static_cast<double>(n0);
  const double recall1 = static_cast<double>(cm.counts[1][1]) / static_cast<double>(n1);
  return (recall0 + recall1) / 2.0;
}

}  // namespace dyadic
