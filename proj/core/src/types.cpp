#include "dyadic/types.hpp"

#include <cmath>
#include <set>

#include "dyadic/error.hpp"
#include "dyadic/labeling.hpp"

namespace dyadic {

std::string_view role_token(Role role) noexcept {
  return role == Role::Male ? "m" : "f";
}

std::string_view role_name(Role role) noexcept {
  return role == Role::Male ? "Male" : "Female";
}

std::optional<Role> parse_role(std::string_view token) noexcept {
  if (token == "m") return Role::Male;
  if (token == "f") return Role::Female;
  return std::nullopt;
}

std::string_view block_name(BlockKind kind) noexcept {
  return kind == BlockKind::Linguistic ? "linguistic" : "paralinguistic";
}

FeatureVector::FeatureVector(BlockKind kind, std::vector<double> values)
    : kind_(kind), values_(std::move(values)) {
  const std::size_t want = expected_dim(kind);
  if (values_.size() != want) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(block_name(kind)) + " block has " +
                    std::to_string(values_.size()) + " entries, expected " +
                    std::to_string(want));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::Schema, std::string(block_name(kind)) +
                                         " block entry " + std::to_string(i) +
                                         " is not finite");
    }
  }
}

FeatureVector FeatureVector::zeros(BlockKind kind) {
  return FeatureVector(kind, std::vector<double>(expected_dim(kind), 0.0));
}

namespace {

void validate_partner(const PartnerRecord& p, const std::string& couple_id,
                      Role slot) {
  const std::string where = "couple '" + couple_id + "' " +
                            std::string(role_name(slot)) + ": ";
  if (p.couple_id != couple_id) {
    throw SchemaError(0, where + "partner couple_id '" + p.couple_id +
                             "' does not match dyad");
  }
  if (p.role != slot) {
    throw SchemaError(0, where + "record role does not match its slot");
  }
  if (p.linguistic.kind() != BlockKind::Linguistic ||
      p.paralinguistic.kind() != BlockKind::Paralinguistic) {
    throw SchemaError(0, where + "feature blocks are in the wrong slots");
  }
  for (std::optional<int> item : {std::optional<int>(p.mdmq.good_bad),
                                  std::optional<int>(p.mdmq.happy_sad),
                                  p.mdmq.relaxed_angry, p.mdmq.calm_stressed}) {
    if (item && !is_valid_item(*item)) {
      throw SchemaError(0, where + "MDMQ item out of range 1..6");
    }
  }
  if (p.label && *p.label != compute_valence_label(p.mdmq).value) {
    throw SchemaError(0, where + "label disagrees with MDMQ items");
  }
}

}  // namespace

void validate(const Corpus& corpus) {
  std::set<std::string> seen;
  for (const DyadRecord& dyad : corpus.dyads) {
    if (!seen.insert(dyad.couple_id).second) {
      throw SchemaError(0, "duplicate couple_id '" + dyad.couple_id + "'");
    }
    if (!dyad.male && !dyad.female) {
      throw SchemaError(0, "couple '" + dyad.couple_id + "' has no partner records");
    }
    for (Role role : kRoles) {
      if (const auto& p = dyad.partner(role)) validate_partner(*p, dyad.couple_id, role);
    }
  }
}

}  // namespace dyadic
