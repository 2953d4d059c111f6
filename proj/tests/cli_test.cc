// Copyright 2026 The ContestLab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "contestlab/commands.h"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "contestlab/dataset.h"
#include "contestlab/errors.h"
#include "json.hpp"

namespace contestlab {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun Cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = RunCli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Exit status of the real binary; stdout and stderr are discarded.
int BinaryExit(const std::string& args) {
  const std::string cmd = std::string(CONTESTLAB_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string Config(const std::string& name) {
  return (fs::path(CONTESTLAB_SOURCE_DIR) / "configs" / name).string();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv("CONTESTLAB_SEED");
    dir_ = fs::temp_directory_path() /
           ("contestlab_cli_" + std::string(::testing::UnitTest::GetInstance()
                                                ->current_test_info()
                                                ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override {
    unsetenv("CONTESTLAB_SEED");
    fs::remove_all(dir_);
  }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, PredictExamples) {
  CliRun r = Cli({"predict", "--b1", "0.25", "--ubar-s", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_NEAR(j["p_exceed"].get<double>(), 0.25, 1e-12);
  EXPECT_NEAR(j["p_dropout"].get<double>(), 0.25, 1e-12);
  EXPECT_NEAR(j["mean_b2"].get<double>(), 0.46875, 1e-12);

  r = Cli({"predict", "--b1", "0", "--ubar-s", "0"});
  ASSERT_EQ(r.code, 0);
  j = json::parse(r.out);
  EXPECT_EQ(j["p_exceed"].get<double>(), 0.0);
  EXPECT_EQ(j["p_dropout"].get<double>(), 0.0);
  EXPECT_EQ(j["mean_b2"].get<double>(), 0.5);
}

TEST_F(CliTest, PredictOutOfRangeIsParseError) {
  EXPECT_EQ(Cli({"predict", "--b1", "1.5", "--ubar-s", "0"}).code, 2);
  EXPECT_EQ(Cli({"predict", "--b1", "0.2", "--ubar-s", "-0.1"}).code, 2);
  EXPECT_EQ(BinaryExit("predict --b1 1.5 --ubar-s 0"), 2);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Cli({}).code, 2);
  EXPECT_EQ(Cli({"bogus"}).code, 2);
  EXPECT_EQ(Cli({"predict", "--b1", "0.2"}).code, 2);
  EXPECT_EQ(Cli({"--help"}).code, 0);
}

TEST_F(CliTest, SimulateCutoffZeroProfit) {
  const CliRun r = Cli({"simulate", "--policy", "cutoff:0.25", "--games", "1000000", "--seed",
                     "42", "--bid-step", "0", "--summary", Path("s.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_LE(std::abs(j["mean_profit"].get<double>()), 0.005);
  EXPECT_EQ(j["games"].get<long>(), 1000000);
  EXPECT_EQ(json::parse(Slurp(Path("s.json"))), j);
}

TEST_F(CliTest, SimulateRejectsInvalidPolicies) {
  // A single cell [0, 0.5) leaves (0.5, 1] uncovered.
  EXPECT_EQ(Cli({"simulate", "--policy", "cells:0,0.5,1,0", "--games", "10"}).code, 3);
  // (0.5, 1] misses its infimum.
  EXPECT_EQ(Cli({"simulate", "--policy", "cells:0,0.5,1,0;0.5,0.5,1,1;0.5,1,0,1", "--games",
                 "10"})
                .code,
            3);
  EXPECT_EQ(BinaryExit("simulate --policy cells:0,0.5,1,0 --games 10"), 3);
  EXPECT_EQ(Cli({"simulate", "--policy", "cutoff:1.2", "--games", "10"}).code, 3);
  EXPECT_EQ(Cli({"simulate", "--policy", "cutoff:x", "--games", "10"}).code, 2);
}

TEST_F(CliTest, SimulateZeroGamesWritesHeaderOnly) {
  const CliRun r = Cli({"simulate", "--policy", "cutoff:0.5", "--games", "0", "--seed", "1",
                     "--out", Path("empty.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Slurp(Path("empty.csv")), std::string(kCsvHeader) + "\n");
}

TEST_F(CliTest, SameSeedSameBytes) {
  for (const char* name : {"a", "b"}) {
    const CliRun r = Cli({"simulate", "--policy", "full", "--games", "500", "--seed", "7",
                       "--other-bid", "0.4", "--out", Path(std::string(name) + ".csv"),
                       "--summary", Path(std::string(name) + ".json")});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(Slurp(Path("a.csv")), Slurp(Path("b.csv")));
  EXPECT_EQ(Slurp(Path("a.json")), Slurp(Path("b.json")));
  Cli({"simulate", "--policy", "full", "--games", "500", "--seed", "8", "--other-bid", "0.4",
       "--out", Path("c.csv")});
  EXPECT_NE(Slurp(Path("a.csv")), Slurp(Path("c.csv")));
}

TEST_F(CliTest, SimulateCsvRowsAreValidRecords) {
  ASSERT_EQ(Cli({"simulate", "--policy", "C10", "--games", "200", "--seed", "3", "--agent1",
                 "css:0.5", "--agent2", "sunk:0.5:0.5", "--out", Path("g.csv")})
                .code,
            0);
  std::ifstream in(Path("g.csv"));
  const std::vector<BidRecord> rows = ReadCsv(in);
  ASSERT_EQ(rows.size(), 400u);
  for (const BidRecord& r : rows) {
    EXPECT_EQ(r.treatment, "C10");
    EXPECT_TRUE(r.BalanceIdentityHolds());
  }
}

TEST_F(CliTest, SimulateSeedFromEnvironment) {
  setenv("CONTESTLAB_SEED", "99", 1);
  CliRun r = Cli({"simulate", "--policy", "rank", "--games", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_EQ(j["seed"].get<std::uint64_t>(), 99u);
  EXPECT_FALSE(j["seed_defaulted"].get<bool>());

  r = Cli({"simulate", "--policy", "rank", "--games", "100", "--seed", "5"});
  EXPECT_EQ(json::parse(r.out)["seed"].get<std::uint64_t>(), 5u);

  setenv("CONTESTLAB_SEED", "abc", 1);
  EXPECT_EQ(Cli({"simulate", "--policy", "rank", "--games", "100"}).code, 2);

  unsetenv("CONTESTLAB_SEED");
  r = Cli({"simulate", "--policy", "rank", "--games", "100"});
  j = json::parse(r.out);
  EXPECT_EQ(j["seed"].get<std::uint64_t>(), 0u);
  EXPECT_TRUE(j["seed_defaulted"].get<bool>());
}

TEST_F(CliTest, VerifyPasses) {
  CliRun r = Cli({"verify", "--policy", "cutoff:0.5", "--step", "0.01", "--epsilon", "0.02"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(json::parse(r.out)["passed"].get<bool>());

  r = Cli({"verify", "--policy", "rank", "--out", Path("rank.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  const json full = json::parse(Slurp(Path("rank.json")));
  EXPECT_EQ(full["headstart_sweep"].size(), 121u);
  EXPECT_EQ(full["cse_stage1"].size(), 1u);
  EXPECT_FALSE(full["rank_off_path"].empty());
}

TEST_F(CliTest, VerifyZeroEpsilonFails) {
  const CliRun r = Cli({"verify", "--policy", "none", "--epsilon", "0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("FAIL"), std::string::npos);
  EXPECT_FALSE(json::parse(r.out)["passed"].get<bool>());
}

TEST_F(CliTest, ExperimentMinimalConfig) {
  const CliRun r = Cli({"experiment", "--config", Config("minimal_experiment.json"), "--out",
                     Path("m.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["rows"].get<long>(), 8);
  EXPECT_EQ(j["seed"].get<std::uint64_t>(), 0u);
  EXPECT_TRUE(j["seed_defaulted"].get<bool>());
  std::ifstream in(Path("m.csv"));
  EXPECT_EQ(ReadCsv(in).size(), 8u);
}

TEST_F(CliTest, ExperimentLabShapedConfig) {
  const CliRun r = Cli({"experiment", "--config", Config("lab_experiment.json"), "--out",
                     Path("p.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["subjects"].get<int>(), 180);
  EXPECT_EQ(j["main_rows"].get<long>(), 3600);
  EXPECT_EQ(j["rows"].get<long>(), 3600 + 180 * 5);
  EXPECT_TRUE(j["balance_identities_hold"].get<bool>());
  EXPECT_FALSE(j["seed_defaulted"].get<bool>());
}

TEST_F(CliTest, ExperimentConfigErrors) {
  std::ofstream(Path("bad_key.json")) << R"({"n_sesions": 2})";
  EXPECT_EQ(Cli({"experiment", "--config", Path("bad_key.json")}).code, 8);
  std::ofstream(Path("bad_json.json")) << "{";
  EXPECT_EQ(Cli({"experiment", "--config", Path("bad_json.json")}).code, 8);
  std::ofstream(Path("unbalanced.json")) << R"({"n_sessions": 6, "subjects_per_session": 4})";
  EXPECT_EQ(Cli({"experiment", "--config", Path("unbalanced.json")}).code, 6);
  std::ofstream(Path("odd.json")) << R"({"n_sessions": 4, "subjects_per_session": 3})";
  EXPECT_EQ(Cli({"experiment", "--config", Path("odd.json")}).code, 6);
}

TEST_F(CliTest, AgentSpecs) {
  const AgentSpec css = ParseAgentSpec("css:0.5:fixed=0.3");
  ASSERT_TRUE(std::holds_alternative<CssAgent>(css));
  EXPECT_EQ(std::get<CssAgent>(css).coordination_p, 0.5);
  EXPECT_EQ(std::get<CssAgent>(css).selector.kind, CellSelector::Kind::kFixed);
  EXPECT_EQ(std::get<CssAgent>(css).selector.target, 0.3);
  const AgentSpec sunk = ParseAgentSpec("sunk:0.25");
  ASSERT_TRUE(std::holds_alternative<SunkCostAgent>(sunk));
  EXPECT_EQ(std::get<SunkCostAgent>(sunk).lambda, 0.25);
  EXPECT_EQ(std::get<SunkCostAgent>(sunk).base.selector.kind, CellSelector::Kind::kZero);
  EXPECT_TRUE(std::holds_alternative<NoiseAgent>(ParseAgentSpec("noise")));
  EXPECT_THROW(ParseAgentSpec("css:2"), ParseError);
  EXPECT_THROW(ParseAgentSpec("robot"), ParseError);
  EXPECT_THROW(ParseAgentSpec("css:0.5:best"), ParseError);
}

TEST_F(CliTest, AnalyzeRoundTrip) {
  ASSERT_EQ(Cli({"experiment", "--config", Config("lab_experiment.json"), "--out",
                 Path("d.csv")})
                .code,
            0);
  const CliRun r = Cli({"analyze", "--input", Path("d.csv"), "--out-dir", Path("report")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"h1.json", "h2.json", "h3.json", "h4.json", "h5.json", "cdf_F.csv",
                        "cdf_R.csv", "cdf_C5.csv", "cdf_C10.csv", "tables.txt"}) {
    EXPECT_TRUE(fs::exists(dir_ / "report" / f)) << f;
  }
  EXPECT_EQ(Slurp(dir_ / "report" / "tables.txt"), r.out);
  const json h1 = json::parse(Slurp(dir_ / "report" / "h1.json"));
  EXPECT_EQ(h1["pairs"].size(), 6u);
  const json h3 = json::parse(Slurp(dir_ / "report" / "h3.json"));
  EXPECT_FALSE(h3.empty());
  const std::string cdf = Slurp(dir_ / "report" / "cdf_F.csv");
  EXPECT_EQ(cdf.rfind("x,stage1,stage2,total\n", 0), 0u);
  EXPECT_EQ(std::count(cdf.begin(), cdf.end(), '\n'), 42);
}

TEST_F(CliTest, AnalyzeAcceptsSimulateOutput) {
  ASSERT_EQ(Cli({"simulate", "--policy", "cutoff:0.25", "--games", "2000", "--seed", "4",
                 "--agent1", "css:0.5", "--agent2", "css:0.5", "--out", Path("c5.csv")})
                .code,
            0);
  const CliRun r = Cli({"analyze", "--input", Path("c5.csv"), "--out-dir", Path("out"),
                     "--hypotheses", "h2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json h2 = json::parse(Slurp(dir_ / "out" / "h2.json"));
  bool found = false;
  for (const json& row : h2["rows"]) {
    if (row["treatment"] == "C5") {
      found = true;
      EXPECT_TRUE(row.contains("p"));
    }
  }
  EXPECT_TRUE(found);
  EXPECT_FALSE(fs::exists(dir_ / "out" / "h1.json"));
}

TEST_F(CliTest, AnalyzeEmptyFileIsSchemaError) {
  std::ofstream(Path("empty.csv")).close();
  EXPECT_EQ(Cli({"analyze", "--input", Path("empty.csv"), "--out-dir", Path("o")}).code, 8);
  EXPECT_EQ(BinaryExit("analyze --input " + Path("empty.csv") + " --out-dir " + Path("o")), 8);
  EXPECT_EQ(Cli({"analyze", "--input", Path("empty.csv"), "--unit", "weekly"}).code, 2);
}

}  // namespace
}  // namespace contestlab
