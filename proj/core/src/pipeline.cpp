#include "dyadic/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dyadic/corpus_io.hpp"
#include "dyadic/error.hpp"

namespace dyadic {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::Config, message);
}

template <typename T, typename Parse>
std::vector<T> parse_list(const json& doc, const char* key, Parse parse) {
  if (!doc.is_array() || doc.empty()) config_error(std::string("'") + key + "' must be a non-empty array");
  std::vector<T> out;
  for (const json& item : doc) {
    if (!item.is_string()) config_error(std::string("'") + key + "' entries must be strings");
    const auto parsed = parse(item.get<std::string>());
    if (!parsed) config_error(std::string("unknown ") + key + " entry '" + item.get<std::string>() + "'");
    if (std::find(out.begin(), out.end(), *parsed) != out.end()) {
      config_error(std::string("duplicate ") + key + " entry '" + item.get<std::string>() + "'");
    }
    out.push_back(*parsed);
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failure on '" + path.string() + "'");
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

std::string report_filename(const EvalReport& r) {
  return fmt::format("{}_{}_{}_s{}.json", role_token(r.role), fusion_token(r.mode),
                     family_token(r.family), r.seed);
}

json missing_to_json(const ReportSet& set) {
  json out = json::array();
  for (const auto& [cell, marker] : set.missing) {
    out.push_back(json{{"role", role_token(cell.first)},
                       {"fusion", fusion_token(cell.second)},
                       {"marker", marker}});
  }
  return out;
}

}  // namespace

ExperimentConfig config_from_json(const json& input, const fs::path& base_dir) {
  const json* doc = &input;
  if (input.is_object() && input.contains("format") && input.at("format") == "dyadic-manifest") {
    doc = &input.at("config");
  }
  if (!doc->is_object()) config_error("config must be a JSON object");

  ExperimentConfig cfg;
  bool has_version = false;
  bool has_corpus = false;
  try {
    for (const auto& [key, value] : doc->items()) {
      if (key == "schema_version") {
        if (!value.is_number_integer() || value.get<int>() != kConfigSchemaVersion) {
          config_error(fmt::format("unsupported schema_version (expected {})", kConfigSchemaVersion));
        }
        has_version = true;
      } else if (key == "corpus") {
        if (!value.is_object() || value.size() == 0) config_error("'corpus' must be an object");
        has_corpus = true;
        if (value.contains("path")) {
          if (value.size() != 1) config_error("'corpus.path' cannot be combined with other keys");
          fs::path p = value.at("path").get<std::string>();
          if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
          cfg.corpus.path = p;
        } else if (value.contains("preset")) {
          if (value.at("preset") != "paper") config_error("unknown preset (only \"paper\")");
          SynthParams p = paper_shaped_preset();
          for (const auto& [k, v] : value.items()) {
            if (k == "seed") p.seed = v.get<std::uint64_t>();
            else if (k != "preset") config_error("unknown key 'corpus." + k + "'");
          }
          cfg.corpus.synth = p;
        } else if (value.contains("synth")) {
          if (value.size() != 1) config_error("'corpus.synth' cannot be combined with other keys");
          cfg.corpus.synth = synth_params_from_json(value.at("synth"));
        } else {
          config_error("'corpus' needs one of 'path', 'preset', 'synth'");
        }
      } else if (key == "roles") {
        cfg.roles = parse_list<Role>(value, "roles", parse_role);
      } else if (key == "fusion_modes") {
        cfg.modes = parse_list<FusionMode>(value, "fusion_modes", parse_fusion);
      } else if (key == "families") {
        cfg.families = parse_list<ModelFamily>(value, "families", parse_family);
      } else if (key == "grids") {
        if (!value.is_object()) config_error("'grids' must be an object");
        for (const auto& [fam, points] : value.items()) {
          const auto family = parse_family(fam);
          if (!family) config_error("unknown grid family '" + fam + "'");
          if (!points.is_array()) config_error("grid '" + fam + "' must be an array");
          Grid grid;
          grid.family = *family;
          for (const json& p : points) grid.points.push_back(hyperparams_from_json(*family, p));
          cfg.grids[*family] = std::move(grid);
        }
      } else if (key == "k_outer") {
        cfg.k_outer = value.get<std::size_t>();
      } else if (key == "k_inner") {
        cfg.k_inner = value.get<std::size_t>();
      } else if (key == "seeds") {
        if (!value.is_array()) config_error("'seeds' must be an array");
        cfg.seeds = value.get<std::vector<std::uint64_t>>();
      } else if (key == "svm_tol") {
        cfg.svm_tol = value.get<double>();
      } else if (key == "output_dir") {
        cfg.output_dir = value.get<std::string>();
      } else if (key == "threads") {
        cfg.threads = value.get<std::size_t>();
      } else {
        config_error("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    config_error(std::string("bad config value: ") + e.what());
  }
  if (!has_version) config_error("missing 'schema_version'");
  if (!has_corpus) config_error("missing 'corpus'");
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  const json doc = read_json(path);
  return config_from_json(doc, fs::absolute(path).parent_path());
}

json to_json(const ExperimentConfig& cfg) {
  json doc;
  doc["schema_version"] = kConfigSchemaVersion;
  if (cfg.corpus.path) doc["corpus"] = json{{"path", cfg.corpus.path->string()}};
  else if (cfg.corpus.synth) doc["corpus"] = json{{"synth", to_json(*cfg.corpus.synth)}};
  json roles = json::array();
  for (Role r : cfg.roles) roles.push_back(role_token(r));
  json modes = json::array();
  for (FusionMode m : cfg.modes) modes.push_back(fusion_token(m));
  json families = json::array();
  for (ModelFamily f : cfg.families) families.push_back(family_token(f));
  doc["roles"] = roles;
  doc["fusion_modes"] = modes;
  doc["families"] = families;
  json grids = json::object();
  for (ModelFamily f : cfg.families) {
    const auto it = cfg.grids.find(f);
    const Grid grid = it != cfg.grids.end() ? it->second : default_grid(f);
    json points = json::array();
    for (const Hyperparams& hp : grid.points) points.push_back(hyperparams_to_json(f, hp));
    grids[std::string(family_token(f))] = points;
  }
  doc["grids"] = grids;
  doc["k_outer"] = cfg.k_outer;
  doc["k_inner"] = cfg.k_inner;
  doc["seeds"] = cfg.seeds;
  doc["svm_tol"] = cfg.svm_tol;
  doc["output_dir"] = cfg.output_dir.string();
  doc["threads"] = cfg.threads;
  return doc;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.corpus.path.has_value() == cfg.corpus.synth.has_value()) {
    config_error("exactly one corpus source is required");
  }
  if (cfg.corpus.synth) {
    try {
      validate(*cfg.corpus.synth);
    } catch (const Error& e) {
      config_error(std::string("invalid synth parameters: ") + e.what());
    }
  }
  if (cfg.k_outer < 2) config_error("k_outer must be at least 2");
  if (cfg.k_inner < 2) config_error("k_inner must be at least 2");
  if (cfg.seeds.empty()) config_error("seed list must not be empty");
  if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size()) {
    config_error("seed list has duplicates");
  }
  if (!(cfg.svm_tol > 0.0)) config_error("svm_tol must be positive");
  if (cfg.roles.empty() || cfg.modes.empty() || cfg.families.empty()) {
    config_error("roles, fusion_modes and families must be non-empty");
  }
  for (const auto& [family, grid] : cfg.grids) {
    try {
      validate_grid(grid);
    } catch (const Error& e) {
      config_error(e.what());
    }
  }
}

std::string config_hash(const ExperimentConfig& cfg) {
  json doc = to_json(cfg);
  doc.erase("output_dir");
  doc.erase("threads");
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

Corpus resolve_corpus(const ExperimentConfig& cfg) {
  if (cfg.corpus.path) return load_corpus(*cfg.corpus.path);
  return generate_corpus(*cfg.corpus.synth);
}

std::vector<fs::path> write_summaries(const ReportSet& set, const fs::path& dir) {
  std::vector<fs::path> files;
  write_text(dir / "summary.txt", render_summary(set));
  files.emplace_back("summary.txt");
  for (Role role : set.roles) {
    const std::string csv = render_confusion_csv(set, role);
    if (csv.empty()) continue;
    const fs::path name = fmt::format("confusion_{}.csv", role == Role::Male ? "male" : "female");
    write_text(dir / name, csv);
    files.push_back(name);
  }
  return files;
}

RunOutcome run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  std::error_code ec;
  fs::create_directories(cfg.output_dir / "reports", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create '" + cfg.output_dir.string() + "': " + ec.message());

  RunOutcome outcome;
  ReportSet& set = outcome.reports;
  set.roles = cfg.roles;
  set.modes = cfg.modes;
  set.families = cfg.families;

  json manifest;
  manifest["format"] = "dyadic-manifest";
  manifest["tool_version"] = kToolVersion;
  manifest["config"] = to_json(cfg);
  manifest["config_hash"] = config_hash(cfg);
  manifest["seeds"] = cfg.seeds;

  auto flush_manifest = [&](const std::string& status, const std::optional<std::string>& error) {
    manifest["status"] = status;
    manifest["error"] = error ? json(*error) : json(nullptr);
    manifest["missing_cells"] = missing_to_json(set);
    json files = json::array();
    for (const fs::path& f : outcome.files) files.push_back(f.generic_string());
    manifest["files"] = files;
    write_text(cfg.output_dir / "manifest.json", manifest.dump(2) + "\n");
  };

  try {
    const Corpus corpus = resolve_corpus(cfg);
    const CorpusStats stats = corpus_stats(corpus);
    manifest["corpus_stats"] = json{
        {"couples", stats.couples},
        {"male", {{"samples", stats.male.samples}, {"negatives", stats.male.negatives}}},
        {"female", {{"samples", stats.female.samples}, {"negatives", stats.female.negatives}}}};

    ExperimentSpec spec;
    spec.roles = cfg.roles;
    spec.modes = cfg.modes;
    spec.families = cfg.families;
    spec.grids = cfg.grids;
    spec.cv.k_outer = cfg.k_outer;
    spec.cv.k_inner = cfg.k_inner;
    spec.cv.svm.tol = cfg.svm_tol;
    spec.cv.threads = cfg.threads;

    for (std::uint64_t seed : cfg.seeds) {
      spec.cv.seed = seed;
      const ExperimentResult result = run_experiment_matrix(corpus, spec);
      set.add(result);
      for (const CellResult& cell : result.cells) {
        for (const EvalReport& r : cell.reports) {
          const fs::path name = fs::path("reports") / report_filename(r);
          write_text(cfg.output_dir / name, to_json(r).dump(2) + "\n");
          outcome.files.push_back(name);
        }
      }
    }
    for (const fs::path& f : write_summaries(set, cfg.output_dir)) outcome.files.push_back(f);
    flush_manifest("complete", std::nullopt);
  } catch (const Error& e) {
    flush_manifest("failed", std::string(to_string(e.code())) + ": " + e.what());
    throw;
  } catch (const std::exception& e) {
    flush_manifest("failed", e.what());
    throw;
  }
  return outcome;
}

ReportSet rerender_reports(const fs::path& run_dir) {
  const json manifest = read_json(run_dir / "manifest.json");
  if (!manifest.contains("format") || manifest.at("format") != "dyadic-manifest") {
    throw Error(ErrorCode::Config, "'" + (run_dir / "manifest.json").string() + "' is not a run manifest");
  }
  const ExperimentConfig cfg = config_from_json(manifest);
  ReportSet set;
  set.roles = cfg.roles;
  set.modes = cfg.modes;
  set.families = cfg.families;
  for (const json& m : manifest.at("missing_cells")) {
    set.missing[{*parse_role(m.at("role").get<std::string>()),
                 *parse_fusion(m.at("fusion").get<std::string>())}] = m.at("marker").get<std::string>();
  }
  for (const json& f : manifest.at("files")) {
    const std::string name = f.get<std::string>();
    if (name.rfind("reports/", 0) != 0) continue;
    EvalReport r = eval_report_from_json(read_json(run_dir / name));
    if (std::find(set.seeds.begin(), set.seeds.end(), r.seed) == set.seeds.end()) set.seeds.push_back(r.seed);
    set.reports.push_back(std::move(r));
  }
  write_summaries(set, run_dir);
  return set;
}

}  // namespace dyadic
