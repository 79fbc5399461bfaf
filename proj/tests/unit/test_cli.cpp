#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

Run run_cli(const std::string& args, const fs::path& scratch) {
  const auto out = scratch / "stdout.txt";
  const auto err = scratch / "stderr.txt";
  const std::string cmd = std::string("\"") + POLYLAB_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& j) {
  const auto p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string example(const std::string& name) { return std::string(POLYLAB_CONFIG_DIR) + "/examples/" + name; }

TEST(Cli, ValidateAcceptsShippedConfig) {
  const auto dir = polylab::fixtures::scratch_dir("cli_validate");
  const auto r = run_cli("validate --config " + example("verify_constant.json"), dir);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out), json::array());
}

TEST(Cli, ValidateListsDiagnostics) {
  const auto dir = polylab::fixtures::scratch_dir("cli_validate_bad");
  const auto p = write_config(dir, "bad.json", json::parse(R"({"environment": {"family": "Constant"}, "replicas": 0})"));
  const auto r = run_cli("validate --config " + p.string(), dir);
  EXPECT_EQ(r.code, 2);
  const auto diags = json::parse(r.out);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0]["field"], "replicas");
}

TEST(Cli, ValidateUnparseableFileGivesOneDiagnostic) {
  const auto dir = polylab::fixtures::scratch_dir("cli_validate_syntax");
  const auto p = dir / "broken.json";
  std::ofstream(p) << "{\"environment\": ";
  const auto r = run_cli("validate --config " + p.string(), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.out).size(), 1u);
}

TEST(Cli, VerifyConstantEnvironmentExitsZero) {
  const auto dir = polylab::fixtures::scratch_dir("cli_verify");
  const auto r = run_cli("verify --config " + example("verify_constant.json") + " --out " + (dir / "out").string(), dir);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "out" / "verify.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "out" / "run_meta.json"));
}

TEST(Cli, InvalidConfigIsExitTwoWithJsonOnStderr) {
  const auto dir = polylab::fixtures::scratch_dir("cli_invalid");
  const auto p = write_config(dir, "bad.json", json::parse(R"({"environment": {"family": "Constant"}, "nGrid": []})"));
  const auto r = run_cli("simulate --config " + p.string() + " --out " + (dir / "out").string(), dir);
  EXPECT_EQ(r.code, 2);
  const auto err = json::parse(r.err);
  EXPECT_EQ(err["error"], "config");
  EXPECT_EQ(err["diagnostics"][0]["field"], "nGrid");
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Cli, MissingConfigFileIsIoError) {
  const auto dir = polylab::fixtures::scratch_dir("cli_missing");
  EXPECT_EQ(run_cli("verify --config " + (dir / "nope.json").string(), dir).code, 3);
}

TEST(Cli, ReportWithoutInputsIsIoError) {
  const auto dir = polylab::fixtures::scratch_dir("cli_report");
  fs::create_directories(dir / "empty");
  const auto r = run_cli("report --out " + (dir / "empty").string(), dir);
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(json::parse(r.err)["error"], "io");
}

TEST(Cli, UsageErrorsAreConfigErrors) {
  const auto dir = polylab::fixtures::scratch_dir("cli_usage");
  EXPECT_EQ(run_cli("", dir).code, 2);
  EXPECT_EQ(run_cli("simulate --format xml --config " + example("verify_constant.json"), dir).code, 2);
  EXPECT_EQ(run_cli("frobnicate", dir).code, 2);
}

TEST(Cli, FailedCheckIsExitOne) {
  const auto dir = polylab::fixtures::scratch_dir("cli_fail");
  // A zero tolerance on the mean-one z-score cannot hold for a random environment.
  const json j = json::parse(R"({"environment": {"family": "LogNormal", "params": {"beta": 1.0}, "seed": 1},
    "nGrid": [5], "replicas": 50, "verify": {"checks": ["meanOne"], "seMultiplier": 0}})");
  const auto p = write_config(dir, "strict.json", j);
  const auto r = run_cli("verify --config " + p.string() + " --out " + (dir / "out").string(), dir);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("meanOne"), std::string::npos);
}

TEST(Cli, RerunIsByteIdenticalAndSeedOverrides) {
  const auto dir = polylab::fixtures::scratch_dir("cli_determinism");
  const std::string cfg = example("simulate_d1.json");
  ASSERT_EQ(run_cli("simulate --config " + cfg + " --out " + (dir / "a").string(), dir).code, 0);
  ASSERT_EQ(run_cli("simulate --config " + cfg + " --threads 2 --out " + (dir / "b").string(), dir).code, 0);
  ASSERT_EQ(run_cli("simulate --config " + cfg + " --seed 99 --out " + (dir / "c").string(), dir).code, 0);
  for (const char* f : {"replicas.jsonl", "endpoints.csv", "paths.csv"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  EXPECT_NE(slurp(dir / "a" / "endpoints.csv"), slurp(dir / "c" / "endpoints.csv"));
  const auto meta = json::parse(slurp(dir / "c" / "run_meta.json"));
  EXPECT_EQ(meta["config"]["environment"]["seed"], 99);
}

TEST(Cli, ReportSummarizesEarlierRun) {
  const auto dir = polylab::fixtures::scratch_dir("cli_report_ok");
  ASSERT_EQ(run_cli("verify --config " + example("verify_constant.json") + " --out " + dir.string(), dir).code, 0);
  const auto r = run_cli("report --out " + dir.string(), dir);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(slurp(dir / "report.txt").find("martingale"), std::string::npos);
}

}  // namespace
