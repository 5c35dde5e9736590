#pragma once

#include <cstddef>
#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "dyadic/types.hpp"

namespace dyadic {

// How strongly the partner's blocks carry the target's label.
struct PartnerSignal {
  double linguistic = 0.0;
  double paralinguistic = 0.0;

  friend bool operator==(const PartnerSignal&, const PartnerSignal&) = default;
};

// Generative model, per couple and role:
//   label ~ Bernoulli(1 - negative_rate)
//   block = N(0, noise_scale^2) + planted shifts
// A planted shift moves a fixed random subset of coordinates (a fraction
// `informative_fraction` of the block, random sign each) by
//   +-effect_size * strength,   sign set by the label it encodes.
// Own blocks encode the own label with strength self_signal. A partner's
// blocks additionally encode the target's label with the per-modality
// strengths in partner_signal_<target role>, each on its own coordinate subset.
struct SynthParams {
  std::size_t n_couples = 100;
  double negative_rate_male = 0.5;
  double negative_rate_female = 0.5;
  double self_signal = 0.0;
  PartnerSignal partner_signal_male;    // female blocks -> male label
  PartnerSignal partner_signal_female;  // male blocks -> female label
  double noise_scale = 1.0;
  double effect_size = 1.0;
  double informative_fraction = 0.1;
  // Fractions of couples missing the male / female record. The two sets are
  // disjoint, so every couple keeps at least one partner.
  double dropout_male = 0.0;
  double dropout_female = 0.0;
  std::uint64_t seed = 0;

  const PartnerSignal& partner_signal(Role target) const noexcept {
    return target == Role::Male ? partner_signal_male : partner_signal_female;
  }
  double negative_rate(Role role) const noexcept {
    return role == Role::Male ? negative_rate_male : negative_rate_female;
  }

  friend bool operator==(const SynthParams&, const SynthParams&) = default;
};

// Throws Error(InvalidParams) naming the first out-of-range field.
void validate(const SynthParams& params);

// Deterministic for a fixed params (including seed). MDMQ items are sampled
// uniformly among the item pairs whose average falls on the label's side of
// the threshold, so labels round-trip through the labeling rule.
Corpus generate_corpus(const SynthParams& params);

// 368 couples; dropout leaves 341 male and 338 female records; class priors
// 32/341 (male) and 46/338 (female). Male labels are carried mostly by the
// female paralinguistic block, female labels mostly by the male linguistic
// block; own-behaviour signal is weak.
SynthParams paper_shaped_preset();

nlohmann::json to_json(const SynthParams& params);
// Missing keys keep their defaults; unknown keys are rejected (ConfigError).
SynthParams synth_params_from_json(const nlohmann::json& doc);

}  // namespace dyadic
