#include "dyadic/report.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dyadic/error.hpp"

namespace dyadic {

using nlohmann::json;

namespace {

json confusion_to_json(const ConfusionMatrix& cm) {
  return json::array({json::array({cm.counts[0][0], cm.counts[0][1]}),
                      json::array({cm.counts[1][0], cm.counts[1][1]})});
}

ConfusionMatrix confusion_from_json(const json& doc) {
  ConfusionMatrix cm;
  for (int t = 0; t < 2; ++t) {
    for (int p = 0; p < 2; ++p) cm.counts[t][p] = doc.at(t).at(p).get<std::size_t>();
  }
  return cm;
}

json optional_score(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
std::optional<double> score_from(const json& doc) {
  return doc.is_null() ? std::nullopt : std::optional<double>(doc.get<double>());
}

std::string percent(double v) { return fmt::format("{:.1f}", 100.0 * v); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

json to_json(const EvalReport& r) {
  json folds = json::array();
  for (const FoldResult& f : r.folds) {
    json scores = json::array();
    for (const auto& s : f.inner_scores) scores.push_back(optional_score(s));
    folds.push_back(json{{"fold", f.fold},
                         {"chosen_index", f.chosen_index},
                         {"chosen", hyperparams_to_json(r.family, f.chosen)},
                         {"inner_degenerate", f.inner_degenerate},
                         {"inner_scores", std::move(scores)},
                         {"n_train", f.n_train},
                         {"n_eval", f.n_eval},
                         {"confusion", confusion_to_json(f.confusion)},
                         {"balanced_accuracy", optional_score(f.balanced_accuracy)}});
  }
  return json{{"format", "dyadic-eval-report"},
              {"version", 1},
              {"role", role_token(r.role)},
              {"fusion", fusion_token(r.mode)},
              {"family", family_token(r.family)},
              {"seed", r.seed},
              {"k_outer", r.k_outer},
              {"k_inner", r.k_inner},
              {"n_samples", r.n_samples},
              {"n_negative", r.n_negative},
              {"excluded_missing_partner", r.excluded_missing_partner},
              {"folds", std::move(folds)},
              {"pooled_confusion", confusion_to_json(r.pooled)},
              {"pooled_balanced_accuracy", r.pooled_balanced_accuracy},
              {"fold_mean", r.fold_mean},
              {"fold_sd", r.fold_sd},
              {"folds_scored", r.folds_scored},
              {"notes", json::array({"outer and inner folds are couple-disjoint and unstratified",
                                     "dyads lacking the partner record are excluded from "
                                     "partner-aware feature sets"})}};
}

EvalReport eval_report_from_json(const json& doc) {
  try {
    if (doc.at("format") != "dyadic-eval-report") {
      throw Error(ErrorCode::Schema, "not an evaluation report document");
    }
    EvalReport r;
    const auto role = parse_role(doc.at("role").get<std::string>());
    const auto mode = parse_fusion(doc.at("fusion").get<std::string>());
    const auto family = parse_family(doc.at("family").get<std::string>());
    if (!role || !mode || !family) throw Error(ErrorCode::Schema, "unknown role, fusion or family");
    r.role = *role;
    r.mode = *mode;
    r.family = *family;
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.k_outer = doc.at("k_outer").get<std::size_t>();
    r.k_inner = doc.at("k_inner").get<std::size_t>();
    r.n_samples = doc.at("n_samples").get<std::size_t>();
    r.n_negative = doc.at("n_negative").get<std::size_t>();
    r.excluded_missing_partner = doc.at("excluded_missing_partner").get<std::size_t>();
    for (const json& f : doc.at("folds")) {
      FoldResult fr;
      fr.fold = f.at("fold").get<std::size_t>();
      fr.chosen_index = f.at("chosen_index").get<std::size_t>();
      fr.chosen = hyperparams_from_json(r.family, f.at("chosen"));
      fr.inner_degenerate = f.at("inner_degenerate").get<bool>();
      for (const json& s : f.at("inner_scores")) fr.inner_scores.push_back(score_from(s));
      fr.n_train = f.at("n_train").get<std::size_t>();
      fr.n_eval = f.at("n_eval").get<std::size_t>();
      fr.confusion = confusion_from_json(f.at("confusion"));
      fr.balanced_accuracy = score_from(f.at("balanced_accuracy"));
      r.folds.push_back(std::move(fr));
    }
    r.pooled = confusion_from_json(doc.at("pooled_confusion"));
    r.pooled_balanced_accuracy = doc.at("pooled_balanced_accuracy").get<double>();
    r.fold_mean = doc.at("fold_mean").get<double>();
    r.fold_sd = doc.at("fold_sd").get<double>();
    r.folds_scored = doc.at("folds_scored").get<std::size_t>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("malformed evaluation report: ") + e.what());
  }
}

void ReportSet::add(const ExperimentResult& result) {
  if (std::find(seeds.begin(), seeds.end(), result.seed) == seeds.end()) seeds.push_back(result.seed);
  auto note = [](auto& list, auto v) {
    if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
  };
  for (const CellResult& cell : result.cells) {
    note(roles, cell.role);
    note(modes, cell.mode);
    if (cell.missing) missing[{cell.role, cell.mode}] = *cell.missing;
    for (const EvalReport& r : cell.reports) {
      note(families, r.family);
      reports.push_back(r);
    }
  }
}

std::optional<double> median_pooled(const ReportSet& set, Role role, FusionMode mode,
                                    ModelFamily family) {
  std::vector<double> values;
  for (const EvalReport& r : set.reports) {
    if (r.role == role && r.mode == mode && r.family == family) values.push_back(r.pooled_balanced_accuracy);
  }
  if (values.empty()) return std::nullopt;
  return median(std::move(values));
}

TableCell summarize_cell(const ReportSet& set, Role role, FusionMode mode) {
  TableCell cell;
  if (const auto it = set.missing.find({role, mode}); it != set.missing.end()) {
    cell.missing = it->second;
    return cell;
  }
  for (ModelFamily f : set.families) {
    const auto m = median_pooled(set, role, mode, f);
    if (m && (!cell.value || *m > *cell.value)) {
      cell.value = m;
      cell.family = f;
    }
  }
  return cell;
}

std::optional<std::pair<FusionMode, ModelFamily>> best_for_role(const ReportSet& set, Role role) {
  std::optional<std::pair<FusionMode, ModelFamily>> best;
  double best_value = -1.0;
  for (FusionMode mode : set.modes) {
    const TableCell cell = summarize_cell(set, role, mode);
    if (cell.value && *cell.value > best_value) {
      best_value = *cell.value;
      best = std::pair{mode, *cell.family};
    }
  }
  return best;
}

std::string render_summary(const ReportSet& set) {
  std::string out;
  out += "Balanced accuracy (%) of the best model per approach\n";
  out += "pooled over outer folds; ";
  if (set.seeds.size() == 1) {
    out += fmt::format("seed {}\n", set.seeds.front());
  } else {
    std::string seeds;
    for (std::size_t i = 0; i < set.seeds.size(); ++i) {
      seeds += (i ? ", " : "") + std::to_string(set.seeds[i]);
    }
    out += fmt::format("median over seeds {}\n", seeds);
  }
  out += "\n";

  constexpr std::size_t kApproachWidth = 46;
  constexpr std::size_t kCellWidth = 22;
  out += fmt::format("{:<{}}", "Approach", kApproachWidth);
  for (Role role : set.roles) out += fmt::format("| {:<{}}", role_name(role), kCellWidth);
  out += "\n";
  out += std::string(kApproachWidth, '-');
  for (std::size_t i = 0; i < set.roles.size(); ++i) out += "+" + std::string(kCellWidth + 1, '-');
  out += "\n";
  for (FusionMode mode : set.modes) {
    out += fmt::format("{:<{}}", fusion_label(mode), kApproachWidth);
    for (Role role : set.roles) {
      const TableCell cell = summarize_cell(set, role, mode);
      std::string text;
      if (cell.missing) text = *cell.missing;
      else if (cell.value) text = fmt::format("{} ({})", percent(*cell.value), family_token(*cell.family));
      else text = "n/a";
      out += fmt::format("| {:<{}}", text, kCellWidth);
    }
    out += "\n";
  }
  out += fmt::format("{:<{}}", "Random baseline", kApproachWidth);
  for (std::size_t i = 0; i < set.roles.size(); ++i) out += fmt::format("| {:<{}}", "50.0", kCellWidth);
  out += "\n\n";

  out += "Per-family detail: pooled % [fold mean +- sd] per seed\n";
  for (Role role : set.roles) {
    for (FusionMode mode : set.modes) {
      if (set.missing.contains({role, mode})) continue;
      out += fmt::format("{} / {}\n", role_name(role), fusion_token(mode));
      for (ModelFamily family : set.families) {
        std::string line = fmt::format("  {:<14}", family_token(family));
        bool any = false;
        for (const EvalReport& r : set.reports) {
          if (r.role != role || r.mode != mode || r.family != family) continue;
          any = true;
          line += fmt::format(" s{}: {} [{} +- {}]", r.seed, percent(r.pooled_balanced_accuracy),
                              percent(r.fold_mean), percent(r.fold_sd));
        }
        if (any) out += line + "\n";
      }
    }
  }
  return out;
}

std::string render_confusion_csv(const ReportSet& set, Role role) {
  const auto best = best_for_role(set, role);
  if (!best) return {};
  std::string out = "role,approach,family,seed,true_label,predicted_0,predicted_1\n";
  for (const EvalReport& r : set.reports) {
    if (r.role != role || r.mode != best->first || r.family != best->second) continue;
    for (int t = 0; t < 2; ++t) {
      out += fmt::format("{},{},{},{},{},{},{}\n", role_name(role), fusion_token(r.mode),
                         family_token(r.family), r.seed, t, r.pooled.counts[t][0],
                         r.pooled.counts[t][1]);
    }
  }
  return out;
}

}  // namespace dyadic
