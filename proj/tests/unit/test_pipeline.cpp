#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dyadic/error.hpp"
#include "dyadic/pipeline.hpp"

using namespace dyadic;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json small_config(const fs::path& out) {
  return json{{"schema_version", 1},
              {"corpus", {{"synth", {{"n_couples", 40}, {"negative_rate_male", 0.3},
                                     {"negative_rate_female", 0.3}, {"self_signal", 0.5},
                                     {"seed", 3}}}}},
              {"roles", {"m", "f"}},
              {"fusion_modes", {"baseline", "partner_both"}},
              {"families", {"linear_svm"}},
              {"grids", {{"linear_svm", {{{"C", 1.0}}}}}},
              {"k_outer", 4},
              {"k_inner", 3},
              {"seeds", {1, 2}},
              {"output_dir", out.string()}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dyadic_test_" + name);
  fs::remove_all(p);
  return p;
}

ErrorCode code_of(const json& doc) {
  try {
    validate(config_from_json(doc));
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

}  // namespace

TEST(Config, RoundTripAndDefaults) {
  const ExperimentConfig cfg = config_from_json(json{{"schema_version", 1}, {"corpus", {{"preset", "paper"}}}});
  EXPECT_EQ(cfg.k_outer, 10u);
  EXPECT_EQ(cfg.k_inner, 5u);
  EXPECT_EQ(cfg.seeds, std::vector<std::uint64_t>{1});
  EXPECT_EQ(cfg.modes.size(), 4u);
  ASSERT_TRUE(cfg.corpus.synth);
  EXPECT_EQ(*cfg.corpus.synth, paper_shaped_preset());
  const ExperimentConfig again = config_from_json(to_json(cfg));
  EXPECT_EQ(to_json(again).dump(), to_json(cfg).dump());
}

TEST(Config, RelativePathResolvesAgainstBase) {
  const auto cfg = config_from_json(json{{"schema_version", 1}, {"corpus", {{"path", "data/x.jsonl"}}}}, "/base");
  EXPECT_EQ(*cfg.corpus.path, fs::path("/base/data/x.jsonl"));
}

TEST(Config, Rejections) {
  const json good = small_config("out");
  auto with = [&](const std::string& key, json value) {
    json d = good;
    d[key] = std::move(value);
    return d;
  };
  EXPECT_EQ(code_of(with("k_outer", 1)), ErrorCode::Config);
  EXPECT_EQ(code_of(with("k_inner", 0)), ErrorCode::Config);
  EXPECT_EQ(code_of(with("seeds", json::array())), ErrorCode::Config);
  EXPECT_EQ(code_of(with("seeds", {1, 1})), ErrorCode::Config);
  EXPECT_EQ(code_of(with("svm_tol", 0.0)), ErrorCode::Config);
  EXPECT_EQ(code_of(with("roles", {"x"})), ErrorCode::Config);
  EXPECT_EQ(code_of(with("families", {"linear_svm", "linear_svm"})), ErrorCode::Config);
  EXPECT_EQ(code_of(with("surprise", 1)), ErrorCode::Config);
  EXPECT_EQ(code_of(with("schema_version", 2)), ErrorCode::Config);
  EXPECT_EQ(code_of(with("corpus", {{"preset", "other"}})), ErrorCode::Config);
  EXPECT_EQ(code_of(with("corpus", {{"path", "a"}, {"preset", "paper"}})), ErrorCode::Config);
  EXPECT_EQ(code_of(with("grids", {{"linear_svm", {{{"C", -1.0}}}}})), ErrorCode::Config);
  json no_version = good;
  no_version.erase("schema_version");
  EXPECT_EQ(code_of(no_version), ErrorCode::Config);
}

TEST(Config, HashIgnoresOutputAndThreads) {
  ExperimentConfig a = config_from_json(small_config("one"));
  ExperimentConfig b = config_from_json(small_config("two"));
  b.threads = 7;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.seeds = {1, 3};
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Pipeline, RunWritesArtifactsAndRerenders) {
  const fs::path out = scratch("run");
  const ExperimentConfig cfg = config_from_json(small_config(out));
  const RunOutcome outcome = run_experiment(cfg);
  EXPECT_EQ(outcome.reports.reports.size(), 2u * 2u * 1u * 2u);
  for (const char* f : {"summary.txt", "manifest.json", "confusion_male.csv", "confusion_female.csv",
                        "reports/m_baseline_linear_svm_s1.json", "reports/f_partner_both_linear_svm_s2.json"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const json manifest = json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(manifest.at("status"), "complete");
  EXPECT_EQ(manifest.at("config_hash"), config_hash(cfg));
  EXPECT_EQ(manifest.at("tool_version"), kToolVersion);

  const std::string summary = slurp(out / "summary.txt");
  fs::remove(out / "summary.txt");
  rerender_reports(out);
  EXPECT_EQ(slurp(out / "summary.txt"), summary);

  // The manifest doubles as a config.
  const ExperimentConfig from_manifest = config_from_json(manifest);
  EXPECT_EQ(config_hash(from_manifest), config_hash(cfg));
  fs::remove_all(out);
}

TEST(Pipeline, MissingCorpusFileIsIo) {
  json doc = small_config(scratch("missing"));
  doc["corpus"] = {{"path", "/nonexistent/features.jsonl"}};
  try {
    run_experiment(config_from_json(doc));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}
