#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace dyadic {

// counts[true_label][predicted_label]
struct ConfusionMatrix {
  std::array<std::array<std::size_t, 2>, 2> counts{};

  void add(int truth, int predicted) noexcept { ++counts[truth][predicted]; }
  std::size_t total() const noexcept;
  std::size_t true_count(int label) const noexcept { return counts[label][0] + counts[label][1]; }

  ConfusionMatrix& operator+=(const ConfusionMatrix& other) noexcept;
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Throws DimensionMismatch when the spans differ in length.
ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted);

// Unweighted mean of the two per-class recalls.
// Throws Error(UndefinedRecall) when a true class has no samples.
double balanced_accuracy(const ConfusionMatrix& cm);

}  // namespace dyadic
