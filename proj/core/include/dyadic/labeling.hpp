#pragma once

#include "dyadic/types.hpp"

namespace dyadic {

inline constexpr int kMdmqMin = 1;
inline constexpr int kMdmqMax = 6;
inline constexpr double kNegativeThreshold = 3.5;

struct ValenceLabel {
  int value = 1;                // 0 = negative, 1 = positive
  double averaged_score = 1.0;  // (good_bad + happy_sad) / 2, in [1, 6]
};

// Binary valence from the two valence items of the mood questionnaire.
//
// Scale polarity: a low item value is the positive pole ("good mood",
// "happy") and a high value the negative pole. An averaged score of 3.5 or
// more is negative (0); anything lower is positive (1). The arousal items
// are never consulted.
//
// Throws Error(OutOfRangeItem) if either valence item lies outside 1..6.
ValenceLabel compute_valence_label(const MdmqItems& items);

bool is_valid_item(int value) noexcept;

}  // namespace dyadic
