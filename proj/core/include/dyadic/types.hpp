#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dyadic {

inline constexpr std::size_t kLinguisticDim = 768;
inline constexpr std::size_t kParalinguisticDim = 176;
inline constexpr std::size_t kMultimodalDim = kLinguisticDim + kParalinguisticDim;

enum class BlockKind { Linguistic, Paralinguistic };

enum class Role { Male, Female };

inline constexpr std::array<Role, 2> kRoles = {Role::Male, Role::Female};

constexpr std::size_t expected_dim(BlockKind kind) noexcept {
  return kind == BlockKind::Linguistic ? kLinguisticDim : kParalinguisticDim;
}

constexpr Role other(Role role) noexcept {
  return role == Role::Male ? Role::Female : Role::Male;
}

// Wire token used in feature files ("m" / "f").
std::string_view role_token(Role role) noexcept;
// Human-readable name used in reports ("Male" / "Female").
std::string_view role_name(Role role) noexcept;
std::optional<Role> parse_role(std::string_view token) noexcept;

std::string_view block_name(BlockKind kind) noexcept;

// A fixed-length block of finite feature values. Construction validates the
// length against the block kind, so a FeatureVector in hand is always valid.
class FeatureVector {
 public:
  FeatureVector(BlockKind kind, std::vector<double> values);

  static FeatureVector zeros(BlockKind kind);

  BlockKind kind() const noexcept { return kind_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  BlockKind kind_;
  std::vector<double> values_;
};

// Multidimensional Mood Questionnaire items on the 1..6 bipolar scale.
// Only good_bad and happy_sad feed the valence label; the arousal items are
// carried through ingestion untouched.
struct MdmqItems {
  int good_bad = 1;
  int happy_sad = 1;
  std::optional<int> relaxed_angry;
  std::optional<int> calm_stressed;

  friend bool operator==(const MdmqItems&, const MdmqItems&) = default;
};

struct PartnerRecord {
  std::string couple_id;
  Role role = Role::Male;
  FeatureVector linguistic = FeatureVector::zeros(BlockKind::Linguistic);
  FeatureVector paralinguistic = FeatureVector::zeros(BlockKind::Paralinguistic);
  MdmqItems mdmq;
  std::optional<int> label;  // 0 = negative, 1 = positive

  friend bool operator==(const PartnerRecord&, const PartnerRecord&) = default;
};

struct DyadRecord {
  std::string couple_id;
  std::optional<PartnerRecord> male;
  std::optional<PartnerRecord> female;

  const std::optional<PartnerRecord>& partner(Role role) const noexcept {
    return role == Role::Male ? male : female;
  }
  std::optional<PartnerRecord>& partner(Role role) noexcept {
    return role == Role::Male ? male : female;
  }

  friend bool operator==(const DyadRecord&, const DyadRecord&) = default;
};

enum class Provenance { Ingested, Synthetic };

struct Corpus {
  std::vector<DyadRecord> dyads;
  Provenance provenance = Provenance::Ingested;
  std::optional<std::uint64_t> seed;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// Checks every Corpus/DyadRecord/PartnerRecord invariant; throws SchemaError
// (line 0) naming the first violation.
void validate(const Corpus& corpus);

}  // namespace dyadic
