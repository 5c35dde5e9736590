#include "dyadic/folds.hpp"

#include <algorithm>
#include <random>

#include "dyadic/error.hpp"

namespace dyadic {

std::size_t FoldPlan::fold_of(const std::string& couple_id) const {
  const auto it = assignments.find(couple_id);
  if (it == assignments.end()) {
    throw Error(ErrorCode::Internal, "couple '" + couple_id + "' is not in the fold plan");
  }
  return it->second;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (const auto& [id, fold] : assignments) ++sizes[fold];
  return sizes;
}

FoldPlan plan_grouped_folds(std::span<const std::string> couple_ids, std::size_t k,
                            std::uint64_t seed) {
  if (k == 0) throw Error(ErrorCode::InvalidParams, "fold count must be positive");
  std::vector<std::string> groups(couple_ids.begin(), couple_ids.end());
  std::sort(groups.begin(), groups.end());
  groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
  if (groups.size() < k) {
    throw Error(ErrorCode::TooFewGroups, std::to_string(groups.size()) + " couples cannot fill " +
                                             std::to_string(k) + " folds");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(groups.begin(), groups.end(), rng);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  for (std::size_t i = 0; i < groups.size(); ++i) plan.assignments.emplace(groups[i], i % k);
  return plan;
}

Split split_rows(const FoldPlan& plan, std::size_t fold, std::span<const std::string> row_groups,
                 std::span<const std::size_t> rows) {
  Split split;
  auto place = [&](std::size_t r) {
    (plan.fold_of(row_groups[r]) == fold ? split.eval : split.train).push_back(r);
  };
  if (rows.empty()) {
    for (std::size_t r = 0; r < row_groups.size(); ++r) place(r);
  } else {
    for (std::size_t r : rows) place(r);
  }
  return split;
}

}  // namespace dyadic
