// Copyright 2026 The wmtomo Authors
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

// End-to-end tests of the wmtomo executable.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("wmtomo_cli_") + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args) const {
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string("'") + WMTOMO_CLI_PATH + "' " + args + " 2>'" + err.string() + "'";
    Result r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
  }

  fs::path write_file(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SimulateStrongPointerOnEigenstate) {
  const Result r = run("simulate --state 0,0,1 --eps 10000 --a 0 --ensemble 30 --seed 7 --json");
  // x and y slopes vanish at this strength, so only z can be reported.
  EXPECT_EQ(r.exit_code, 1);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["weak_estimate"][2].get<double>(), 1.0);
  EXPECT_TRUE(j["weak_estimate"][0].is_null());
  EXPECT_NE(r.err.find("stage(s) x, y"), std::string::npos) << r.err;
}

TEST_F(CliTest, SimulateRejectsUnphysicalState) {
  const Result r = run("simulate --state 0,0,2 --eps 0.5 --a 0.4 --ensemble 30 --seed 7");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("Bloch-ball bound"), std::string::npos) << r.err;
}

TEST_F(CliTest, SimulateRejectsBadParameters) {
  EXPECT_EQ(run("simulate --state 0,0,0.5 --eps 0").exit_code, 2);
  EXPECT_EQ(run("simulate --state 0,0,0.5 --eps -1").exit_code, 2);
  EXPECT_EQ(run("simulate --state 0,0,0.5 --ensemble 2").exit_code, 2);
  EXPECT_EQ(run("simulate --state 0,0").exit_code, 2);
  EXPECT_EQ(run("simulate").exit_code, 2);
  EXPECT_EQ(run("simulate --state 0,0,0.5 --bogus").exit_code, 2);
  EXPECT_EQ(run("").exit_code, 2);
}

TEST_F(CliTest, SimulateLargeEnsembleIsAccurate) {
  const Result r = run("simulate --state 0.3,-0.2,0.5 --eps 0.5 --a 0.4 --ensemble 100000 --seed 7 --json");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const double truth[3] = {0.3, -0.2, 0.5};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(j["weak_estimate"][i].get<double>(), truth[i], 0.02);
    EXPECT_NEAR(j["projective_estimate"][i].get<double>(), truth[i], 0.02);
  }
}

TEST_F(CliTest, SimulateTextReport) {
  const Result r = run("simulate --random --eps 0.5 --a 0.2 --ensemble 30 --seed 1");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  for (const char* key : {"true_state", "weak_estimate", "projective_estimate", "fidelity_weak",
                          "fidelity_projective", "discard_fraction_z", "discard_fraction_x"}) {
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  }
}

TEST_F(CliTest, SweepSingleCell) {
  const fs::path cfg = write_file("plan.json", R"({"state_count": 1, "runs_per_state": 1, "ensemble_sizes": [30],
    "epsilon_grid": [0.5], "a_grid": [0.2]})");
  const Result r = run("sweep --quiet --config '" + cfg.string() + "' --out-dir '" + (dir_ / "out").string() + "'");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::istringstream csv(slurp(dir_ / "out" / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line,
            "epsilon,a,ensemble,mean_fidelity_weak,mean_fidelity_projective,score,states,runs,discard_fraction,failures");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 1);

  const auto manifest = nlohmann::json::parse(slurp(dir_ / "out" / "manifest.json"));
  EXPECT_EQ(manifest["plan"]["state_count"], 1);
  EXPECT_EQ(manifest["rows"], 1);
  EXPECT_TRUE(manifest.contains("version"));
  EXPECT_TRUE(manifest.contains("wall_clock_seconds"));
  EXPECT_TRUE(manifest.contains("failures"));
}

TEST_F(CliTest, SweepIsByteIdenticalAcrossRunsAndWorkers) {
  const std::string flags = "--quiet --states 6 --runs 5 --ensemble 30 --eps 0.3,1 --a 0,0.4 --seed 11";
  ASSERT_EQ(run("sweep " + flags + " --workers 1 --out-dir '" + (dir_ / "a").string() + "'").exit_code, 0);
  ASSERT_EQ(run("sweep " + flags + " --workers 1 --out-dir '" + (dir_ / "b").string() + "'").exit_code, 0);
  ASSERT_EQ(run("sweep " + flags + " --workers 4 --out-dir '" + (dir_ / "c").string() + "'").exit_code, 0);
  const std::string a = slurp(dir_ / "a" / "sweep.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b" / "sweep.csv"));
  EXPECT_EQ(a, slurp(dir_ / "c" / "sweep.csv"));
}

TEST_F(CliTest, FlagsOverrideConfig) {
  const fs::path cfg = write_file("plan.json", R"({"state_count": 50, "runs_per_state": 1, "ensemble_sizes": [30],
    "epsilon_grid": [0.5], "a_grid": [0.2]})");
  const Result r = run("score --quiet --config '" + cfg.string() + "' --states 3 --a 0,0.8");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "epsilon,a,ensemble,score,states");
  EXPECT_NE(r.out.find("0.5,0,30,"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find(",3\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("0.80000000000000004,30,"), std::string::npos) << r.out;
}

TEST_F(CliTest, SweepConfigErrorsExitTwo) {
  const fs::path unknown = write_file("unknown.json", R"({"state_count": 1, "stats": 2})");
  Result r = run("sweep --quiet --config '" + unknown.string() + "'");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("'stats'"), std::string::npos) << r.err;

  const fs::path syntax = write_file("syntax.json", "{\n  \"state_count\": 1,\n  oops\n}");
  r = run("sweep --quiet --config '" + syntax.string() + "'");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;

  r = run("sweep --quiet --config '" + (dir_ / "missing.json").string() + "'");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(run("sweep --quiet --estimator fancy").exit_code, 2);
  EXPECT_EQ(run("sweep --quiet --eps 0").exit_code, 2);
}

TEST_F(CliTest, AnalyticCheckDefault) {
  const Result r = run("analytic-check --points 200");
  EXPECT_EQ(r.exit_code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("max deviation over checked formulas"), std::string::npos);
  EXPECT_NE(r.out.find("all checks within tolerance"), std::string::npos);
}

TEST_F(CliTest, AnalyticCheckMonteCarloVerdicts) {
  const Result r = run("analytic-check --points 10 --mc-samples 1000000 --seed 3");
  EXPECT_EQ(r.exit_code, 0) << r.out;
  for (const char* label : {"z:+1", "z:-1", "z:discard", "x:+1", "x:-1", "x:discard", "y:+1", "y:-1"}) {
    EXPECT_NE(r.out.find(std::string("monte-carlo ") + label), std::string::npos) << label;
  }
}

TEST_F(CliTest, AnalyticCheckReportsPrintedVariant) {
  const Result r = run("analytic-check --formula discard_x --variant paper-eps1 --points 200 --mc-samples 0");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.out.find("discard_x(paper-eps1)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("worst at"), std::string::npos) << r.out;
  EXPECT_EQ(run("analytic-check --formula w").exit_code, 2);
}

TEST_F(CliTest, VersionAndHelp) {
  EXPECT_EQ(run("--version").exit_code, 0);
  const Result r = run("--help");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("analytic-check"), std::string::npos);
}
