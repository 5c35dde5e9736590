#include "dyadic/fusion.hpp"

#include <algorithm>

#include "dyadic/error.hpp"
#include "dyadic/labeling.hpp"

namespace dyadic {

std::string_view fusion_token(FusionMode mode) noexcept {
  switch (mode) {
    case FusionMode::Baseline: return "baseline";
    case FusionMode::WithPartnerLinguistic: return "partner_linguistic";
    case FusionMode::WithPartnerParalinguistic: return "partner_paralinguistic";
    case FusionMode::WithPartnerBoth: return "partner_both";
  }
  return "baseline";
}

std::optional<FusionMode> parse_fusion(std::string_view token) noexcept {
  for (FusionMode m : kFusionModes) {
    if (fusion_token(m) == token) return m;
  }
  return std::nullopt;
}

std::string_view fusion_label(FusionMode mode) noexcept {
  switch (mode) {
    case FusionMode::Baseline: return "Multimodal fusion (baseline)";
    case FusionMode::WithPartnerLinguistic: return "Multimodal + Dyadic (partner linguistic)";
    case FusionMode::WithPartnerParalinguistic: return "Multimodal + Dyadic (partner paralinguistic)";
    case FusionMode::WithPartnerBoth: return "Multimodal + Dyadic (partner both)";
  }
  return "";
}

std::vector<double> concat_blocks(std::span<const double> first, std::span<const double> second) {
  std::vector<double> out;
  out.reserve(first.size() + second.size());
  out.insert(out.end(), first.begin(), first.end());
  out.insert(out.end(), second.begin(), second.end());
  return out;
}

std::vector<double> fuse_multimodal(const FeatureVector& linguistic,
                                    const FeatureVector& paralinguistic) {
  if (linguistic.kind() != BlockKind::Linguistic || linguistic.size() != kLinguisticDim ||
      paralinguistic.kind() != BlockKind::Paralinguistic ||
      paralinguistic.size() != kParalinguisticDim) {
    throw Error(ErrorCode::DimensionMismatch,
                "multimodal fusion needs a 768-d linguistic and a 176-d paralinguistic block");
  }
  return concat_blocks(linguistic.values(), paralinguistic.values());
}

FusedSample fuse_dyadic(const PartnerRecord& own, const PartnerRecord* partner, FusionMode mode) {
  if (partner != nullptr) {
    if (partner->couple_id != own.couple_id) {
      throw Error(ErrorCode::CoupleMismatch, "partner record belongs to couple '" +
                                                 partner->couple_id + "', expected '" +
                                                 own.couple_id + "'");
    }
    if (partner->role == own.role) {
      throw Error(ErrorCode::RoleConflict,
                  "both records of couple '" + own.couple_id + "' have the same role");
    }
  } else if (needs_partner(mode)) {
    throw Error(ErrorCode::MissingPartner, "couple '" + own.couple_id + "' has no " +
                                               std::string(role_name(other(own.role))) +
                                               " record for " + std::string(fusion_token(mode)));
  }

  FusedSample sample;
  sample.couple_id = own.couple_id;
  sample.role = own.role;
  sample.label = own.label ? *own.label : compute_valence_label(own.mdmq).value;
  sample.features = fuse_multimodal(own.linguistic, own.paralinguistic);
  sample.features.reserve(fused_dim(mode));

  auto append = [&](const FeatureVector& block) {
    const auto v = block.values();
    sample.features.insert(sample.features.end(), v.begin(), v.end());
  };
  if (mode == FusionMode::WithPartnerLinguistic || mode == FusionMode::WithPartnerBoth) {
    append(partner->linguistic);
  }
  if (mode == FusionMode::WithPartnerParalinguistic || mode == FusionMode::WithPartnerBoth) {
    append(partner->paralinguistic);
  }
  return sample;
}

namespace {

std::vector<const DyadRecord*> eligible_dyads(const Corpus& corpus, Role role, FusionMode mode,
                                              std::size_t* excluded) {
  std::vector<const DyadRecord*> out;
  std::size_t dropped = 0;
  for (const DyadRecord& dyad : corpus.dyads) {
    if (!dyad.partner(role)) continue;
    if (needs_partner(mode) && !dyad.partner(other(role))) {
      ++dropped;
      continue;
    }
    out.push_back(&dyad);
  }
  std::sort(out.begin(), out.end(),
            [](const DyadRecord* a, const DyadRecord* b) { return a->couple_id < b->couple_id; });
  if (excluded != nullptr) *excluded = dropped;
  return out;
}

[[noreturn]] void throw_empty(Role role, FusionMode mode) {
  throw Error(ErrorCode::EmptyDesignMatrix, "no eligible " + std::string(role_name(role)) +
                                                " samples for " + std::string(fusion_token(mode)));
}

}  // namespace

std::vector<FusedSample> build_samples(const Corpus& corpus, Role role, FusionMode mode) {
  const auto dyads = eligible_dyads(corpus, role, mode, nullptr);
  if (dyads.empty()) throw_empty(role, mode);
  std::vector<FusedSample> out;
  out.reserve(dyads.size());
  for (const DyadRecord* dyad : dyads) {
    const auto& partner = dyad->partner(other(role));
    out.push_back(fuse_dyadic(*dyad->partner(role), partner ? &*partner : nullptr, mode));
  }
  return out;
}

DesignMatrix build_design_matrix(const Corpus& corpus, Role role, FusionMode mode) {
  DesignMatrix dm;
  dm.role = role;
  dm.mode = mode;
  const auto dyads = eligible_dyads(corpus, role, mode, &dm.excluded_missing_partner);
  if (dyads.empty()) throw_empty(role, mode);

  dm.features = Matrix(dyads.size(), fused_dim(mode));
  dm.labels.reserve(dyads.size());
  dm.couple_ids.reserve(dyads.size());
  for (std::size_t r = 0; r < dyads.size(); ++r) {
    const auto& partner = dyads[r]->partner(other(role));
    FusedSample s = fuse_dyadic(*dyads[r]->partner(role), partner ? &*partner : nullptr, mode);
    std::copy(s.features.begin(), s.features.end(), dm.features.row(r).begin());
    dm.labels.push_back(s.label);
    dm.couple_ids.push_back(std::move(s.couple_id));
  }
  return dm;
}

}  // namespace dyadic
