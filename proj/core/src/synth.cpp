#include "dyadic/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dyadic/error.hpp"
#include "dyadic/labeling.hpp"

namespace dyadic {

using nlohmann::json;

namespace {

// A planted direction: coordinates of one block and a sign for each.
struct Direction {
  std::vector<std::size_t> coords;
  std::vector<double> signs;
};

Direction draw_direction(std::size_t dim, double fraction, std::mt19937_64& rng) {
  const auto count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(dim))));
  std::vector<std::size_t> all(dim);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  Direction d;
  d.coords.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(d.coords.begin(), d.coords.end());
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < count; ++i) d.signs.push_back(coin(rng) ? 1.0 : -1.0);
  return d;
}

void plant(std::vector<double>& block, const Direction& dir, double magnitude, int label) {
  if (magnitude == 0.0) return;
  const double side = label == 0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < dir.coords.size(); ++i) {
    block[dir.coords[i]] += side * magnitude * dir.signs[i];
  }
}

// Directions indexed [target role][source is partner][block kind].
using DirectionSet = Direction[2][2][2];

std::size_t idx(Role r) { return r == Role::Male ? 0 : 1; }
std::size_t idx(BlockKind k) { return k == BlockKind::Linguistic ? 0 : 1; }

MdmqItems draw_items(int label, std::mt19937_64& rng) {
  std::vector<std::pair<int, int>> pairs;
  for (int a = kMdmqMin; a <= kMdmqMax; ++a) {
    for (int b = kMdmqMin; b <= kMdmqMax; ++b) {
      if (compute_valence_label(MdmqItems{a, b, {}, {}}).value == label) pairs.emplace_back(a, b);
    }
  }
  std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
  std::uniform_int_distribution<int> item(kMdmqMin, kMdmqMax);
  const auto [good_bad, happy_sad] = pairs[pick(rng)];
  MdmqItems items{good_bad, happy_sad, {}, {}};
  items.relaxed_angry = item(rng);
  items.calm_stressed = item(rng);
  return items;
}

void check_unit(double v, const char* name, bool open) {
  const bool ok = open ? (v > 0.0 && v < 1.0) : (v >= 0.0 && v <= 1.0);
  if (!ok || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidParams, fmt::format("{} = {} is outside {}", name, v,
                                                      open ? "(0, 1)" : "[0, 1]"));
  }
}

}  // namespace

void validate(const SynthParams& p) {
  if (p.n_couples == 0) throw Error(ErrorCode::InvalidParams, "n_couples must be positive");
  check_unit(p.negative_rate_male, "negative_rate_male", true);
  check_unit(p.negative_rate_female, "negative_rate_female", true);
  check_unit(p.self_signal, "self_signal", false);
  check_unit(p.partner_signal_male.linguistic, "partner_signal_male.linguistic", false);
  check_unit(p.partner_signal_male.paralinguistic, "partner_signal_male.paralinguistic", false);
  check_unit(p.partner_signal_female.linguistic, "partner_signal_female.linguistic", false);
  check_unit(p.partner_signal_female.paralinguistic, "partner_signal_female.paralinguistic", false);
  check_unit(p.dropout_male, "dropout_male", false);
  check_unit(p.dropout_female, "dropout_female", false);
  if (!(p.informative_fraction > 0.0) || p.informative_fraction > 1.0) {
    throw Error(ErrorCode::InvalidParams, "informative_fraction must lie in (0, 1]");
  }
  if (!(p.noise_scale > 0.0) || !std::isfinite(p.noise_scale)) {
    throw Error(ErrorCode::InvalidParams, "noise_scale must be positive");
  }
  if (!(p.effect_size >= 0.0) || !std::isfinite(p.effect_size)) {
    throw Error(ErrorCode::InvalidParams, "effect_size must be non-negative");
  }
  const auto missing = static_cast<std::size_t>(std::llround(p.dropout_male * static_cast<double>(p.n_couples))) +
                       static_cast<std::size_t>(std::llround(p.dropout_female * static_cast<double>(p.n_couples)));
  if (missing > p.n_couples) {
    throw Error(ErrorCode::InvalidParams, "dropout fractions leave some couple with no partner");
  }
}

Corpus generate_corpus(const SynthParams& p) {
  validate(p);
  std::mt19937_64 rng(p.seed);

  DirectionSet dirs;
  for (Role target : kRoles) {
    for (std::size_t from_partner = 0; from_partner < 2; ++from_partner) {
      for (BlockKind kind : {BlockKind::Linguistic, BlockKind::Paralinguistic}) {
        dirs[idx(target)][from_partner][idx(kind)] =
            draw_direction(expected_dim(kind), p.informative_fraction, rng);
      }
    }
  }

  // Disjoint dropout sets.
  const auto n = p.n_couples;
  const auto n_drop_m = static_cast<std::size_t>(std::llround(p.dropout_male * static_cast<double>(n)));
  const auto n_drop_f = static_cast<std::size_t>(std::llround(p.dropout_female * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<char> has_male(n, 1);
  std::vector<char> has_female(n, 1);
  for (std::size_t i = 0; i < n_drop_m; ++i) has_male[order[i]] = 0;
  for (std::size_t i = n_drop_m; i < n_drop_m + n_drop_f; ++i) has_female[order[i]] = 0;

  const std::size_t width = std::to_string(n).size();
  std::normal_distribution<double> noise(0.0, p.noise_scale);

  Corpus corpus;
  corpus.provenance = Provenance::Synthetic;
  corpus.seed = p.seed;
  corpus.dyads.reserve(n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::string id = fmt::format("c{:0{}}", c + 1, width);
    int labels[2];
    for (Role r : kRoles) {
      std::bernoulli_distribution negative(p.negative_rate(r));
      labels[idx(r)] = negative(rng) ? 0 : 1;
    }

    DyadRecord dyad{id, std::nullopt, std::nullopt};
    for (Role r : kRoles) {
      // Features are drawn even for dropped records so the RNG stream, and
      // thus every other record, does not depend on the dropout pattern.
      const Role partner = other(r);
      std::vector<double> blocks[2];
      for (BlockKind kind : {BlockKind::Linguistic, BlockKind::Paralinguistic}) {
        auto& block = blocks[idx(kind)];
        block.resize(expected_dim(kind));
        for (double& v : block) v = noise(rng);
        plant(block, dirs[idx(r)][0][idx(kind)], p.effect_size * p.self_signal, labels[idx(r)]);
        const PartnerSignal& cross = p.partner_signal(partner);
        const double strength = kind == BlockKind::Linguistic ? cross.linguistic : cross.paralinguistic;
        plant(block, dirs[idx(partner)][1][idx(kind)], p.effect_size * strength, labels[idx(partner)]);
      }
      MdmqItems items = draw_items(labels[idx(r)], rng);

      const bool present = r == Role::Male ? has_male[c] != 0 : has_female[c] != 0;
      if (!present) continue;
      PartnerRecord rec;
      rec.couple_id = id;
      rec.role = r;
      rec.linguistic = FeatureVector(BlockKind::Linguistic, std::move(blocks[0]));
      rec.paralinguistic = FeatureVector(BlockKind::Paralinguistic, std::move(blocks[1]));
      rec.mdmq = items;
      rec.label = labels[idx(r)];
      dyad.partner(r) = std::move(rec);
    }
    corpus.dyads.push_back(std::move(dyad));
  }
  return corpus;
}

SynthParams paper_shaped_preset() {
  SynthParams p;
  p.n_couples = 368;
  p.dropout_male = 27.0 / 368.0;
  p.dropout_female = 30.0 / 368.0;
  p.negative_rate_male = 32.0 / 341.0;
  p.negative_rate_female = 46.0 / 338.0;
  p.self_signal = 0.05;
  p.partner_signal_male = PartnerSignal{0.25, 0.6};
  p.partner_signal_female = PartnerSignal{0.4, 0.15};
  p.noise_scale = 1.0;
  p.effect_size = 1.0;
  p.informative_fraction = 0.1;
  p.seed = 233;  // draws exactly 32 / 46 negatives
  return p;
}

json to_json(const SynthParams& p) {
  return json{{"n_couples", p.n_couples},
              {"negative_rate_male", p.negative_rate_male},
              {"negative_rate_female", p.negative_rate_female},
              {"self_signal", p.self_signal},
              {"partner_signal_male",
               {{"linguistic", p.partner_signal_male.linguistic},
                {"paralinguistic", p.partner_signal_male.paralinguistic}}},
              {"partner_signal_female",
               {{"linguistic", p.partner_signal_female.linguistic},
                {"paralinguistic", p.partner_signal_female.paralinguistic}}},
              {"noise_scale", p.noise_scale},
              {"effect_size", p.effect_size},
              {"informative_fraction", p.informative_fraction},
              {"dropout_male", p.dropout_male},
              {"dropout_female", p.dropout_female},
              {"seed", p.seed}};
}

SynthParams synth_params_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::Config, "synth parameters must be an object");
  SynthParams p;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "n_couples") p.n_couples = value.get<std::size_t>();
      else if (key == "negative_rate_male") p.negative_rate_male = value.get<double>();
      else if (key == "negative_rate_female") p.negative_rate_female = value.get<double>();
      else if (key == "self_signal") p.self_signal = value.get<double>();
      else if (key == "partner_signal_male" || key == "partner_signal_female") {
        PartnerSignal s;
        for (const auto& [k, v] : value.items()) {
          if (k == "linguistic") s.linguistic = v.get<double>();
          else if (k == "paralinguistic") s.paralinguistic = v.get<double>();
          else throw Error(ErrorCode::Config, "unknown synth key '" + key + "." + k + "'");
        }
        (key == "partner_signal_male" ? p.partner_signal_male : p.partner_signal_female) = s;
      } else if (key == "noise_scale") p.noise_scale = value.get<double>();
      else if (key == "effect_size") p.effect_size = value.get<double>();
      else if (key == "informative_fraction") p.informative_fraction = value.get<double>();
      else if (key == "dropout_male") p.dropout_male = value.get<double>();
      else if (key == "dropout_female") p.dropout_female = value.get<double>();
      else if (key == "seed") p.seed = value.get<std::uint64_t>();
      else throw Error(ErrorCode::Config, "unknown synth key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("bad synth parameter: ") + e.what());
  }
  return p;
}

}  // namespace dyadic
