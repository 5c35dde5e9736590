#include "dyadic/labeling.hpp"

#include "dyadic/error.hpp"

namespace dyadic {

bool is_valid_item(int value) noexcept {
  return value >= kMdmqMin && value <= kMdmqMax;
}

ValenceLabel compute_valence_label(const MdmqItems& items) {
  if (!is_valid_item(items.good_bad) || !is_valid_item(items.happy_sad)) {
    throw Error(ErrorCode::OutOfRangeItem,
                "valence items must lie in 1..6 (good_bad=" +
                    std::to_string(items.good_bad) +
                    ", happy_sad=" + std::to_string(items.happy_sad) + ")");
  }
  // Compare the integer sum against 2 * 3.5 = 7 so the boundary is exact.
  const int sum = items.good_bad + items.happy_sad;
  return ValenceLabel{sum >= 7 ? 0 : 1, sum / 2.0};
}

}  // namespace dyadic
