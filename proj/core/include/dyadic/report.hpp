#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dyadic/experiment.hpp"

namespace dyadic {

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& doc);

// Everything needed to render the results table, independent of whether the
// reports came from a live run or were reloaded from disk.
struct ReportSet {
  std::vector<Role> roles;
  std::vector<FusionMode> modes;
  std::vector<ModelFamily> families;
  std::vector<std::uint64_t> seeds;
  std::vector<EvalReport> reports;
  std::map<std::pair<Role, FusionMode>, std::string> missing;  // cell -> marker

  void add(const ExperimentResult& result);
};

struct TableCell {
  std::optional<double> value;          // seed-median pooled balanced accuracy of the best family
  std::optional<ModelFamily> family;    // best family by that median
  std::optional<std::string> missing;   // marker when the cell could not be evaluated
};

// Per-family seed-median of pooled balanced accuracy, then the best family.
TableCell summarize_cell(const ReportSet& set, Role role, FusionMode mode);

// Median of the pooled balanced accuracies for one (role, mode, family).
std::optional<double> median_pooled(const ReportSet& set, Role role, FusionMode mode,
                                    ModelFamily family);

// Table-shaped plain-text summary: rows are approaches, columns roles,
// percentages to one decimal. Followed by per-family detail.
std::string render_summary(const ReportSet& set);

// Confusion matrices of the best (mode, family) for `role`, one block per
// seed. Empty string when the role has no evaluated cell.
std::string render_confusion_csv(const ReportSet& set, Role role);

// Best (mode, family) for a role by seed-median pooled balanced accuracy.
std::optional<std::pair<FusionMode, ModelFamily>> best_for_role(const ReportSet& set, Role role);

}  // namespace dyadic
