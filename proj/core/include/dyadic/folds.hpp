#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace dyadic {

// Couple-level fold assignment. All records of a couple share one fold, so a
// couple is never on both sides of a split.
struct FoldPlan {
  std::size_t k = 0;
  std::map<std::string, std::size_t> assignments;  // couple_id -> fold in [0, k)
  std::uint64_t seed = 0;

  std::size_t fold_of(const std::string& couple_id) const;  // throws if unknown
  std::vector<std::size_t> fold_sizes() const;
};

// Seeded shuffle of the distinct couple ids, then round-robin assignment.
// Duplicate ids in the input are collapsed. Throws TooFewGroups when there
// are fewer distinct couples than folds, InvalidParams when k == 0.
FoldPlan plan_grouped_folds(std::span<const std::string> couple_ids, std::size_t k,
                            std::uint64_t seed);

struct Split {
  std::vector<std::size_t> train;  // row indices
  std::vector<std::size_t> eval;
};

// Row-level split for `fold`, restricted to `rows` (all rows when empty).
// `row_groups` maps each row index to its couple_id.
Split split_rows(const FoldPlan& plan, std::size_t fold, std::span<const std::string> row_groups,
                 std::span<const std::size_t> rows);

}  // namespace dyadic
