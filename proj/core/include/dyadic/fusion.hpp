#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dyadic/matrix.hpp"
#include "dyadic/types.hpp"

namespace dyadic {

enum class FusionMode {
  Baseline,                   // own linguistic + own paralinguistic
  WithPartnerLinguistic,      // ... + partner linguistic
  WithPartnerParalinguistic,  // ... + partner paralinguistic
  WithPartnerBoth,            // ... + partner linguistic + partner paralinguistic
};

inline constexpr std::array<FusionMode, 4> kFusionModes = {
    FusionMode::Baseline, FusionMode::WithPartnerLinguistic,
    FusionMode::WithPartnerParalinguistic, FusionMode::WithPartnerBoth};

// Config/JSON token ("baseline", "partner_linguistic", ...).
std::string_view fusion_token(FusionMode mode) noexcept;
std::optional<FusionMode> parse_fusion(std::string_view token) noexcept;
// Row label in the results table.
std::string_view fusion_label(FusionMode mode) noexcept;

// 944, 1712, 1120 or 1888.
constexpr std::size_t fused_dim(FusionMode mode) noexcept {
  switch (mode) {
    case FusionMode::Baseline: return kMultimodalDim;
    case FusionMode::WithPartnerLinguistic: return kMultimodalDim + kLinguisticDim;
    case FusionMode::WithPartnerParalinguistic: return kMultimodalDim + kParalinguisticDim;
    case FusionMode::WithPartnerBoth: return 2 * kMultimodalDim;
  }
  return 0;
}

constexpr bool needs_partner(FusionMode mode) noexcept { return mode != FusionMode::Baseline; }

struct FusedSample {
  std::vector<double> features;
  int label = 1;
  std::string couple_id;
  Role role = Role::Male;
};

// Plain concatenation, no dimension checks. fuse_multimodal is this with the
// 768/176 contract enforced.
std::vector<double> concat_blocks(std::span<const double> first, std::span<const double> second);

// Own linguistic entries followed by own paralinguistic entries (944 values).
std::vector<double> fuse_multimodal(const FeatureVector& linguistic,
                                    const FeatureVector& paralinguistic);

// Layout: own-linguistic, own-paralinguistic, then the selected partner
// block(s) with linguistic before paralinguistic. `partner` may be null only
// for Baseline. The label is the own record's label.
FusedSample fuse_dyadic(const PartnerRecord& own, const PartnerRecord* partner, FusionMode mode);

struct DesignMatrix {
  Matrix features;
  std::vector<int> labels;
  std::vector<std::string> couple_ids;  // row-aligned CV grouping keys
  Role role = Role::Male;
  FusionMode mode = FusionMode::Baseline;
  std::size_t excluded_missing_partner = 0;  // dyads dropped for lacking a partner record
};

// One sample per `role` record; dyads without the partner record are dropped
// from partner-aware modes. Rows are ordered by couple_id.
// Throws Error(EmptyDesignMatrix) when nothing qualifies.
std::vector<FusedSample> build_samples(const Corpus& corpus, Role role, FusionMode mode);
DesignMatrix build_design_matrix(const Corpus& corpus, Role role, FusionMode mode);

}  // namespace dyadic
