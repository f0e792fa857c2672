// Copyright 2026 The acescert Authors
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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "support/scratch.hpp"

namespace {

using acescert::testing::read_file;
using acescert::testing::ScratchDir;
using acescert::testing::write_file;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run(const ScratchDir& dir, const std::string& args) {
  const std::string out = (dir / "stdout.txt").string();
  const std::string err = (dir / "stderr.txt").string();
  const std::string cmd =
      std::string(ACESCERT_CLI_PATH) + " " + args + " >'" + out + "' 2>'" + err + "'";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) row.push_back(field);
    if (!line.empty() && line.back() == ',') row.emplace_back();
    rows.push_back(row);
  }
  return rows;
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

TEST(Cli, HelpAndVersion) {
  ScratchDir dir;
  EXPECT_EQ(run(dir, "--help").code, 0);
  const CliResult v = run(dir, "--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_FALSE(v.out.empty());
  EXPECT_EQ(run(dir, "").code, 1);
  EXPECT_EQ(run(dir, "frobnicate").code, 1);
}

TEST(Cli, GenSyntheticRowCountsAndDeterminism) {
  ScratchDir dir;
  const std::string args = " --num-samples 10 --n0 10 --n 100 --seed 42";
  ASSERT_EQ(run(dir, "gen-synthetic --out " + q(dir / "a") + args).code, 0);
  ASSERT_EQ(run(dir, "gen-synthetic --out " + q(dir / "b") + args).code, 0);
  EXPECT_EQ(line_count(read_file(dir / "a/draws.csv")), 1u + 10u * 110u);
  EXPECT_EQ(line_count(read_file(dir / "a/samples.csv")), 11u);
  for (const char* f : {"draws.csv", "samples.csv", "manifest.json", "ground_truth.csv"}) {
    EXPECT_EQ(read_file(dir / "a" / f), read_file(dir / "b" / f)) << f;
  }
  ASSERT_EQ(run(dir, "gen-synthetic --out " + q(dir / "c") + " --num-samples 10 --n0 10 --n 100 --seed 43").code, 0);
  EXPECT_NE(read_file(dir / "a/draws.csv"), read_file(dir / "c/draws.csv"));
}

TEST(Cli, GroundTruthSidecarIsHyperplaneDistance) {
  ScratchDir dir;
  ASSERT_EQ(run(dir, "gen-synthetic --out " + q(dir / "d") +
                         " --w 3,4 --b -1 --x 0.72,0.96 --x 0,0 --x -1,2 --n0 5 --n 5")
                .code,
            0);
  const auto rows = parse_csv(read_file(dir / "d/ground_truth.csv"));
  ASSERT_EQ(rows.size(), 4u);
  const double expected_signed[] = {1.0, -0.2, 0.8};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(std::stod(rows[i + 1][1]), expected_signed[i], 1e-12);
    EXPECT_NEAR(std::stod(rows[i + 1][3]), std::abs(expected_signed[i]), 1e-12);
  }
}

class CliDataset : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::make_unique<ScratchDir>();
    data_ = dir_->path() / "data";
    ASSERT_EQ(run(*dir_, "gen-synthetic --out " + q(data_) +
                             " --num-samples 40 --n0 50 --n 400 --seed 9 --sigma 0.5")
                  .code,
              0);
  }
  CliResult cli(const std::string& args) { return run(*dir_, args); }

  std::unique_ptr<ScratchDir> dir_;
  std::filesystem::path data_;
};

TEST_F(CliDataset, CertifyIsDeterministicAcrossWorkers) {
  const CliResult a = cli("certify --in " + q(data_) + " --theta 0.5 --parallelism 1");
  const CliResult b = cli("certify --in " + q(data_) + " --theta 0.5 --parallelism 4");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto rows = parse_csv(a.out);
  ASSERT_EQ(rows.size(), 41u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"sample_id", "branch", "class", "radius",
                                               "p_lower_A", "p_lower_S"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::string& branch = rows[i][1];
    EXPECT_TRUE(branch == "certified_selection" || branch == "core_selection" ||
                branch == "agreement" || branch == "abstained")
        << branch;
    EXPECT_EQ(rows[i][2].empty(), branch == "abstained");
    if (branch != "certified_selection") {
      EXPECT_EQ(std::stod(rows[i][3]), 0.0);
    }
  }
}

TEST_F(CliDataset, ThetaOneMatchesPlainSmoothing) {
  const CliResult aces = cli("certify --in " + q(data_) + " --theta 1");
  const CliResult rs = cli("certify --in " + q(data_) + " --rs");
  ASSERT_EQ(aces.code, 0) << aces.err;
  ASSERT_EQ(rs.code, 0) << rs.err;
  const auto a = parse_csv(aces.out);
  const auto r = parse_csv(rs.out);
  ASSERT_EQ(a.size(), r.size());
  for (std::size_t i = 1; i < a.size(); ++i) {
    // The ACES bound on p_A is taken at 1 - alpha/2, so it certifies a
    // subset of what plain smoothing certifies, never with a larger radius.
    if (a[i][1] == "certified_selection") {
      EXPECT_EQ(r[i][1], "certified");
      EXPECT_EQ(a[i][2], r[i][2]);
      EXPECT_LE(std::stod(a[i][3]), std::stod(r[i][3]));
    }
    EXPECT_NE(a[i][1], "core_selection");
    EXPECT_TRUE(r[i][5].empty());
  }
}

TEST_F(CliDataset, LargerAlphaNeverAbstainsMore) {
  std::size_t previous = SIZE_MAX;
  for (const char* alpha : {"0.0001", "0.001", "0.01", "0.1"}) {
    const CliResult r = cli("certify --in " + q(data_) + " --theta 0.5 --alpha " + alpha);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    const std::size_t abstained = static_cast<std::size_t>(std::count_if(
        rows.begin() + 1, rows.end(), [](const auto& row) { return row[1] == "abstained"; }));
    EXPECT_LE(abstained, previous) << alpha;
    previous = abstained;
  }
}

TEST_F(CliDataset, SingleThetaSweepAgreesWithCertify) {
  const CliResult cert = cli("certify --in " + q(data_) + " --theta 0.4 --alpha 0.01");
  const CliResult sweep = cli("sweep --in " + q(data_) + " --theta 0.4 --alpha 0.01 --radii 0,0.1");
  ASSERT_EQ(sweep.code, 0) << sweep.err;
  const auto c = parse_csv(cert.out);
  const auto labels = parse_csv(read_file(data_ / "samples.csv"));
  double acr = 0.0;
  int ca0 = 0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (!c[i][2].empty() && c[i][2] == labels[i][1]) {
      acr += std::stod(c[i][3]);
      ++ca0;
    }
  }
  const auto s = parse_csv(sweep.out);
  ASSERT_EQ(s.size(), 2u);
  const auto& head = s[0];
  auto col = [&](const std::string& name) {
    const auto it = std::find(head.begin(), head.end(), name);
    EXPECT_NE(it, head.end()) << name;
    return std::stod(s[1][static_cast<std::size_t>(it - head.begin())]);
  };
  EXPECT_EQ(col("theta"), 0.4);
  EXPECT_NEAR(col("acr_raw"), acr / 40.0, 1e-12);
  EXPECT_NEAR(col("ca_raw_0.00"), ca0 / 40.0, 1e-15);
}

TEST_F(CliDataset, SweepRangeAndDeterminism) {
  const CliResult a = cli("sweep --in " + q(data_) + " --theta 0:1:0.05 --parallelism 1");
  const CliResult b = cli("sweep --in " + q(data_) + " --theta 0:1:0.05 --parallelism 3");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto rows = parse_csv(a.out);
  ASSERT_EQ(rows.size(), 22u);
  EXPECT_EQ(rows[1][0], "0");
  EXPECT_EQ(rows[21][0], "1");
  const CliResult f = cli("sweep --in " + q(data_) + " --theta 0:1:0.05 --out " + q(dir_->path() / "s.csv"));
  ASSERT_EQ(f.code, 0);
  EXPECT_EQ(read_file(dir_->path() / "s.csv"), a.out);
  EXPECT_TRUE(f.out.empty());
}

TEST_F(CliDataset, ArgumentErrors) {
  EXPECT_EQ(cli("certify --in " + q(data_) + " --theta 0.5 --rs").code, 1);
  EXPECT_EQ(cli("certify --in " + q(data_) + " --theta 1.5").code, 1);
  EXPECT_EQ(cli("certify --in " + q(data_) + " --theta 0.5 --alpha 0").code, 1);
  EXPECT_EQ(cli("sweep --in " + q(data_) + " --theta 0.5 --radii 0.5,0.25").code, 1);
  EXPECT_EQ(cli("certify --theta 0.5").code, 1);
  EXPECT_EQ(cli("certify --in " + q(dir_->path() / "nope") + " --theta 0.5").code, 2);
  const CliResult self = cli("certify --in " + q(data_) + " --theta 0.5 --out " + q(data_ / "draws.csv"));
  EXPECT_EQ(self.code, 1);
  EXPECT_FALSE(self.err.empty());
  EXPECT_EQ(cli("certify --in " + q(data_) + " --theta 0.5 --out " + q(data_)).code, 1);
  EXPECT_EQ(line_count(read_file(data_ / "samples.csv")), 41u);
}

TEST_F(CliDataset, CorruptDatasetIsAValidationFailure) {
  std::string draws = read_file(data_ / "draws.csv");
  draws.erase(draws.rfind('\n', draws.size() - 2) + 1);
  write_file(data_ / "draws.csv", draws);
  const CliResult r = cli("certify --in " + q(data_) + " --theta 0.5");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("draws"), std::string::npos) << r.err;
}

TEST_F(CliDataset, ConfigFileSuppliesDefaults) {
  write_file(dir_->path() / "c.toml", "[certify]\nalpha = 0.2\ntheta = 0.3\n");
  const CliResult from_config = cli("--config " + q(dir_->path() / "c.toml") + " certify --in " + q(data_));
  const CliResult from_flags = cli("certify --in " + q(data_) + " --alpha 0.2 --theta 0.3");
  ASSERT_EQ(from_config.code, 0) << from_config.err;
  EXPECT_EQ(from_config.out, from_flags.out);
  const CliResult overridden = cli("--config " + q(dir_->path() / "c.toml") + " certify --in " + q(data_) +
                           " --alpha 0.001");
  EXPECT_EQ(overridden.out, cli("certify --in " + q(data_) + " --alpha 0.001 --theta 0.3").out);
}

TEST(Cli, EmptyDatasetGivesHeaderOnly) {
  ScratchDir dir;
  ASSERT_EQ(run(dir, "gen-synthetic --out " + q(dir / "e") + " --num-samples 0").code, 0);
  const CliResult r = run(dir, "certify --in " + q(dir / "e") + " --theta 0.5");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "sample_id,branch,class,radius,p_lower_A,p_lower_S\n");
}

TEST(Cli, CoverageReportsJson) {
  ScratchDir dir;
  const CliResult rs = run(dir, "coverage --fixture rs --trials 30 --seed 2");
  ASSERT_EQ(rs.code, 0) << rs.err;
  EXPECT_NE(rs.out.find("\"trials\": 30"), std::string::npos);
  EXPECT_NE(rs.out.find("\"violation_fraction\""), std::string::npos);
  EXPECT_NE(rs.out.find("\"n\": 1000"), std::string::npos);
  const CliResult aces = run(dir, "coverage --fixture aces --trials 30 --out " + q(dir / "c.json"));
  ASSERT_EQ(aces.code, 0) << aces.err;
  EXPECT_NE(read_file(dir / "c.json").find("\"kind\": \"aces\""), std::string::npos);
  EXPECT_EQ(run(dir, "coverage --trials 0").code, 1);
  EXPECT_EQ(run(dir, "coverage --fixture bogus").code, 1);
  EXPECT_EQ(run(dir, "coverage --w 1,2").code, 1);
}

}  // namespace
