// dyadic: validate feature files, synthesize corpora, run nested-CV
// experiments and re-render their reports.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dyadic/corpus_io.hpp"
#include "dyadic/error.hpp"
#include "dyadic/pipeline.hpp"
#include "dyadic/synth.hpp"

namespace fs = std::filesystem;
using namespace dyadic;

namespace {

enum Exit : int { kOk = 0, kInvalid = 1, kIo = 2, kNonConvergence = 3 };

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Io: return kIo;
    case ErrorCode::NonConvergence: return kNonConvergence;
    default: return kInvalid;
  }
}

int report_error(const Error& e) {
  std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
  return exit_code_for(e);
}

int cmd_validate(const fs::path& features) {
  const Corpus corpus = load_corpus(features);
  const CorpusStats stats = corpus_stats(corpus);
  std::size_t complete = 0;
  for (const DyadRecord& d : corpus.dyads) complete += d.male && d.female ? 1 : 0;
  fmt::print("{}: ok\n", features.string());
  fmt::print("couples          {}\n", stats.couples);
  fmt::print("complete dyads   {}\n", complete);
  for (Role role : kRoles) {
    const RoleStats& s = stats.role(role);
    fmt::print("{:<7} samples {:>4}  negative {:>4}  positive {:>4}\n", role_name(role), s.samples,
               s.negatives, s.positives());
  }
  return kOk;
}

fs::path sidecar_path(const fs::path& out) {
  fs::path p = out;
  p.replace_extension(".params.json");
  return p;
}

int cmd_synth(const std::string& preset, const std::optional<fs::path>& params_file,
              std::optional<std::size_t> couples, std::optional<std::uint64_t> seed,
              const fs::path& out) {
  SynthParams params;
  if (params_file) {
    std::ifstream in(*params_file);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + params_file->string() + "'");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::Config, std::string("parameter file is not valid JSON: ") + e.what());
    }
    params = synth_params_from_json(doc);
  } else if (preset == "paper") {
    params = paper_shaped_preset();
  } else {
    throw Error(ErrorCode::Config, "unknown preset '" + preset + "' (only \"paper\")");
  }
  if (couples) params.n_couples = *couples;
  if (seed) params.seed = *seed;
  validate(params);

  const Corpus corpus = generate_corpus(params);
  save_corpus(corpus, out);
  const fs::path sidecar = sidecar_path(out);
  {
    std::ofstream s(sidecar);
    if (!s) throw Error(ErrorCode::Io, "cannot write '" + sidecar.string() + "'");
    s << to_json(params).dump(2) << "\n";
  }
  const CorpusStats stats = corpus_stats(corpus);
  fmt::print("wrote {} ({} couples; male {} / {} negative, female {} / {} negative)\n", out.string(),
             stats.couples, stats.male.samples, stats.male.negatives, stats.female.samples,
             stats.female.negatives);
  fmt::print("wrote {}\n", sidecar.string());
  return kOk;
}

int cmd_run(const fs::path& config_path, const std::optional<fs::path>& output,
            std::optional<std::size_t> threads, std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg = load_config(config_path);
  if (output) cfg.output_dir = *output;
  if (threads) cfg.threads = *threads;
  if (seed) cfg.seeds = {*seed};
  const RunOutcome outcome = run_experiment(cfg);
  std::cout << render_summary(outcome.reports);
  fmt::print("\nresults in {}\n", cfg.output_dir.string());
  return kOk;
}

int cmd_report(const fs::path& run_dir) {
  const ReportSet set = rerender_reports(run_dir);
  std::cout << render_summary(set);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic emotion prediction: nested cross-validation over partner feature fusions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  fs::path features;
  auto* validate_cmd = app.add_subcommand("validate", "Check a JSONL feature file and print counts");
  validate_cmd->add_option("features", features, "JSONL feature file")->required();

  std::string preset = "paper";
  std::optional<fs::path> params_file;
  std::optional<std::size_t> couples;
  std::optional<std::uint64_t> synth_seed;
  fs::path synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus (+ params sidecar)");
  synth_cmd->add_option("--preset", preset, "Named preset")->capture_default_str();
  synth_cmd->add_option("--params", params_file, "JSON parameter file (instead of a preset)");
  synth_cmd->add_option("--couples", couples, "Override number of couples");
  synth_cmd->add_option("--seed", synth_seed, "Override generator seed");
  synth_cmd->add_option("--out", synth_out, "Output JSONL path")->required();

  fs::path config_path;
  std::optional<fs::path> output;
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> run_seed;
  auto* run_cmd = app.add_subcommand("run", "Run the experiment matrix from a config or manifest");
  run_cmd->add_option("--config", config_path, "Experiment config (or a run manifest)")->required();
  run_cmd->add_option("--output", output, "Override output directory");
  run_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
  run_cmd->add_option("--seed", run_seed, "Replace the seed list with one seed");

  fs::path run_dir;
  auto* report_cmd = app.add_subcommand("report", "Re-render summary and confusion CSVs of a run");
  report_cmd->add_option("run_dir", run_dir, "Run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (*validate_cmd) return cmd_validate(features);
    if (*synth_cmd) return cmd_synth(preset, params_file, couples, synth_seed, synth_out);
    if (*run_cmd) return cmd_run(config_path, output, threads, run_seed);
    if (*report_cmd) return cmd_report(run_dir);
  } catch (const Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
