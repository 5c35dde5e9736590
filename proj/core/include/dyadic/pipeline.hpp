#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dyadic/report.hpp"
#include "dyadic/synth.hpp"

namespace dyadic {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// Exactly one of `path` / `synth` is set. A preset name is resolved into
// `synth` at parse time so the stored config is self-contained.
struct CorpusSource {
  std::optional<std::filesystem::path> path;
  std::optional<SynthParams> synth;
};

struct ExperimentConfig {
  CorpusSource corpus;
  std::vector<Role> roles{Role::Male, Role::Female};
  std::vector<FusionMode> modes{kFusionModes.begin(), kFusionModes.end()};
  std::vector<ModelFamily> families{kModelFamilies.begin(), kModelFamilies.end()};
  std::map<ModelFamily, Grid> grids;  // families absent here use default_grid
  std::size_t k_outer = 10;
  std::size_t k_inner = 5;
  std::vector<std::uint64_t> seeds{1};
  double svm_tol = 1e-3;
  std::filesystem::path output_dir = "dyadic-out";
  std::size_t threads = 0;  // 0 = all cores; does not affect results
};

// Versioned JSON schema:
//   {"schema_version": 1,
//    "corpus": {"path": "..."} | {"preset": "paper", "seed": 7} | {"synth": {...}},
//    "roles": ["m","f"], "fusion_modes": [...], "families": [...],
//    "grids": {"linear_svm": [{"C": 1}, ...], ...},
//    "k_outer": 10, "k_inner": 5, "seeds": [1], "svm_tol": 0.001,
//    "output_dir": "...", "threads": 0}
// Unknown keys are rejected. A relative corpus path is resolved against
// `base_dir`. A run manifest is accepted too (its embedded config is used).
// Throws Error(Config).
ExperimentConfig config_from_json(const nlohmann::json& doc,
                                  const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);
void validate(const ExperimentConfig& config);

// FNV-1a over the canonical config, excluding output_dir and threads.
std::string config_hash(const ExperimentConfig& config);

Corpus resolve_corpus(const ExperimentConfig& config);

struct RunOutcome {
  ReportSet reports;
  std::vector<std::filesystem::path> files;  // relative to output_dir
};

// Runs every seed and writes into config.output_dir:
//   reports/<role>_<fusion>_<family>_s<seed>.json   one EvalReport each
//   summary.txt                                     results table
//   confusion_<role>.csv                            best model per role
//   manifest.json                                   config, hash, seeds, version, status
// On failure the reports finished so far and a manifest with status
// "failed" are written before the error is rethrown.
RunOutcome run_experiment(const ExperimentConfig& config);

// Rebuilds summary.txt and the confusion CSVs of a run directory from its
// stored reports and manifest. Returns the reloaded set.
ReportSet rerender_reports(const std::filesystem::path& run_dir);

// Writes summary.txt and confusion CSVs for `set` into `dir`.
std::vector<std::filesystem::path> write_summaries(const ReportSet& set,
                                                   const std::filesystem::path& dir);

}  // namespace dyadic
