// Copyright 2026 The idxmac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "idxmac/bench.hpp"
#include "idxmac/config.hpp"
#include "idxmac/mtxt.hpp"

namespace idxmac {
namespace {

namespace fs = std::filesystem;

TEST(Config, ReadsKeysOverDefaults) {
  std::istringstream in("# comment\nvload_base = 20\n  L=8 \nunroll = 2 # trailing\nvlen = 256\n");
  const auto cfg = read_config(in);
  EXPECT_EQ(cfg.cost.vload_base, 20u);
  EXPECT_EQ(cfg.cost.valu, 1u);
  EXPECT_EQ(cfg.L, 8u);
  EXPECT_EQ(cfg.unroll, 2u);
  EXPECT_EQ(cfg.vector_config().vl_max(), 8u);
}

TEST(Config, RejectsBadInput) {
  std::istringstream unknown("speed = 3\n");
  EXPECT_THROW(read_config(unknown), FormatError);
  std::istringstream negative("valu = -1\n");
  EXPECT_THROW(read_config(negative), FormatError);
  std::istringstream no_eq("valu 1\n");
  EXPECT_THROW(read_config(no_eq), FormatError);
  std::istringstream cheap_mem("vload_base = 0\n");
  EXPECT_THROW(read_config(cheap_mem), ConstraintError);
}

TEST(Suite, ParsesLayers) {
  std::istringstream in("# header\nconv1 64 576 3136 1:4\n\nfc 16 32 1 2:4  # tail\n");
  const auto s = read_suite(in, "demo");
  ASSERT_EQ(s.layers.size(), 2u);
  EXPECT_EQ(s.layers[0].a_cols, 576u);
  EXPECT_EQ(s.layers[1].nm, (NMConfig{2, 4}));
}

TEST(Suite, RejectsMalformedLines) {
  std::istringstream short_line("conv 64 576 1:4\n");
  EXPECT_THROW(read_suite(short_line), FormatError);
  std::istringstream misaligned("conv 64 10 16 1:4\n");
  EXPECT_THROW(read_suite(misaligned), FormatError);
  std::istringstream zero("conv 0 16 16 1:4\n");
  EXPECT_THROW(read_suite(zero), FormatError);
}

TEST(Suite, BundledSuitesLoad) {
  for (const char* name : {"resnet50", "densenet121", "inceptionv3"}) {
    const auto s = load_suite(fs::path(IDXMAC_SUITES) / (std::string(name) + ".txt"));
    EXPECT_EQ(s.name, name);
    EXPECT_GE(s.layers.size(), 10u);
  }
}

LayerSuite tiny_suite() {
  std::istringstream in("a 8 32 20 1:4\nb 5 48 33 1:4\nc 4 16 16 1:4\n");
  return read_suite(in, "tiny");
}

TEST(Bench, EmptySuiteGivesHeaderOnly) {
  std::ostringstream out;
  write_bench_csv(out, run_bench(LayerSuite{}, {{1, 4}, {2, 4}}, RunConfig{}));
  EXPECT_EQ(out.str(), std::string(kCsvHeader) + "\n");
}

TEST(Bench, RowsVerifiedAndCountsMatch) {
  const auto report = run_bench(tiny_suite(), {{1, 4}, {2, 4}}, RunConfig{{}, 512, 8, 4, 1});
  ASSERT_EQ(report.rows.size(), 3u * 2u * 2u);
  for (const auto& r : report.rows) {
    EXPECT_TRUE(r.ok) << r.layer << " " << r.error;
    EXPECT_TRUE(r.counts_match) << r.layer;
  }
  EXPECT_EQ(report.aggregates.size(), 4u);
}

TEST(Bench, CsvIsReproducible) {
  RunConfig cfg;
  cfg.L = 8;
  std::ostringstream a, b, c;
  write_bench_csv(a, run_bench(tiny_suite(), {{2, 4}}, cfg, 1));
  write_bench_csv(b, run_bench(tiny_suite(), {{2, 4}}, cfg, 1));
  write_bench_csv(c, run_bench(tiny_suite(), {{2, 4}}, cfg, 3));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str(), c.str());
}

TEST(Bench, FailedLayerIsReportedNotFatal) {
  std::istringstream in("ok 4 16 16 1:4\nbig 4 16 16 1:4\n");
  auto suite = read_suite(in, "x");
  RunConfig cfg;
  cfg.L = 24;  // over the register budget for every layer
  const auto report = run_bench(suite, {}, cfg);
  std::ostringstream out;
  write_bench_csv(out, report);
  EXPECT_NE(out.str().find("error"), std::string::npos);
  for (const auto& r : report.rows) EXPECT_FALSE(r.ok);
}

// --- the command-line tool ------------------------------------------------

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("idxmac-cli-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int cli(const std::string& args) const {
    const std::string cmd = std::string(IDXMAC_CLI) + " " + args + " >" + path("stdout.txt") +
                            " 2>" + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string slurp(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(Cli, GenRunVerifies) {
  ASSERT_EQ(cli("gen --rows 9 --cols 32 --nm 1:4 --seed 3 -o " + path("a.mtxt")), 0);
  ASSERT_EQ(cli("gen --rows 32 --cols 20 --seed 4 -o " + path("b.mtxt")), 0);
  EXPECT_EQ(cli("validate -i " + path("a.mtxt")), 0);
  EXPECT_EQ(cli("run --a " + path("a.mtxt") + " --b " + path("b.mtxt") + " -k all --csv " +
                path("run.csv") + " --dump-program " + path("prog.txt")),
            0);
  const auto out = slurp("stdout.txt");
  EXPECT_NE(out.find("kernel indexmac: verified"), std::string::npos);
  EXPECT_NE(out.find("counts match analytic model: yes"), std::string::npos);
  EXPECT_EQ(out.find("MISMATCH"), std::string::npos);
  EXPECT_EQ(slurp("run.csv").rfind(kCsvHeader, 0), 0u);
  EXPECT_NE(slurp("prog.txt").find("vindexmac.vx"), std::string::npos);
}

TEST_F(Cli, PruneThenRun) {
  ASSERT_EQ(cli("gen --rows 4 --cols 16 --seed 1 -o " + path("d.mtxt")), 0);
  ASSERT_EQ(cli("prune -i " + path("d.mtxt") + " --nm 2:4 -o " + path("s.mtxt")), 0);
  const auto s = std::get<StructuredSparseMatrix>(load_mtxt(path("s.mtxt")));
  EXPECT_EQ(s.nm(), (NMConfig{2, 4}));
  ASSERT_EQ(cli("gen --rows 16 --cols 8 --seed 2 -o " + path("b.mtxt")), 0);
  EXPECT_EQ(cli("run --a " + path("s.mtxt") + " --b " + path("b.mtxt") + " --L 8"), 0);
}

TEST_F(Cli, BadShapeIsExitTwo) {
  EXPECT_EQ(cli("gen --rows 4 --cols 10 --nm 1:4 -o " + path("a.mtxt")), 2);
  EXPECT_NE(slurp("stderr.txt").find("multiple"), std::string::npos);
}

TEST_F(Cli, RegisterBudgetIsExitTwo) {
  ASSERT_EQ(cli("gen --rows 4 --cols 48 --nm 2:4 -o " + path("a.mtxt")), 0);
  ASSERT_EQ(cli("gen --rows 48 --cols 16 -o " + path("b.mtxt")), 0);
  EXPECT_EQ(cli("run --a " + path("a.mtxt") + " --b " + path("b.mtxt") + " --L 24"), 2);
  EXPECT_NE(slurp("stderr.txt").find("register budget"), std::string::npos);
}

TEST_F(Cli, OverDenseValidateIsExitTwo) {
  std::ofstream(path("d.mtxt")) << "dense 1 4\n1 2 3 0\n";
  EXPECT_EQ(cli("validate -i " + path("d.mtxt") + " --nm 2:4"), 2);
  EXPECT_EQ(cli("validate -i " + path("d.mtxt") + " --nm 3:4"), 0);
}

TEST_F(Cli, MissingFileIsExitThree) {
  EXPECT_EQ(cli("validate -i " + path("nope.mtxt")), 3);
}

TEST_F(Cli, UsageErrorIsExitTwo) {
  EXPECT_EQ(cli("run --kernel indexmac"), 2);
  EXPECT_EQ(cli(""), 2);
}

TEST_F(Cli, BenchEmptySuiteWritesHeader) {
  std::ofstream(path("empty.txt")) << "# nothing here\n";
  EXPECT_EQ(cli("bench -s " + path("empty.txt") + " --csv " + path("out.csv")), 0);
  EXPECT_EQ(slurp("out.csv"), std::string(kCsvHeader) + "\n");
}

}  // namespace
}  // namespace idxmac
