// Copyright 2026 The dfreg Authors
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

#include "dfreg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dfreg/io.hpp"
#include "dfreg/transport.hpp"

namespace dfreg {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dfreg_cli_" + std::string(
                               ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }
  std::string out(const std::string& sub = "out") const { return (dir_ / sub).string(); }
  fs::path dir_;
};

std::string noiseless_linear() {
  std::string t = "x,y\n";
  for (int i = 1; i <= 30; ++i) {
    const double x = 0.05 * i;
    t += format_double(x) + "," + format_double(2.0 * x) + "\n";
  }
  return t;
}

TEST_F(CliTest, FitWritesEstimates) {
  const auto data = write("d.csv", noiseless_linear());
  const Result r = run_cli({"fit", "--data", data.string(), "--model", "simple_linear", "-o", out()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("theta_hat = 2"), std::string::npos) << r.out;
  for (const char* f : {"theta.csv", "residuals.csv", "summary.txt", "manifest.ini"}) {
    EXPECT_TRUE(fs::exists(fs::path(out()) / f)) << f;
  }
}

TEST_F(CliTest, TestOnExactFit) {
  const auto data = write("d.csv", noiseless_linear());
  const Result r = run_cli({"test", "--data", data.string(), "--seed", "3", "--null-reps", "49",
                            "-o", out()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("ks_abs = 0\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("p_value = 1\n"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(fs::path(out()) / "null_ecdf.csv"));
}

TEST_F(CliTest, TestOnNoisyBivariateData) {
  std::string t = "x1,x2,y\n";
  const Matrix x = covariate_design("beta_indep", 40, 1);
  for (Index i = 0; i < 40; ++i) {
    t += format_double(x(i, 0)) + "," + format_double(x(i, 1)) + "," +
         format_double(std::sin(7.0 * i)) + "\n";
  }
  const auto data = write("d.csv", t);
  const Result r = run_cli({"test", "--data", data.string(), "--model", "bilinear2d", "--seed",
                            "4", "--null-reps", "19", "--grid-resolution", "6", "-o", out()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const std::string summary = slurp(fs::path(out()) / "summary.txt");
  EXPECT_NE(summary.find("total_cost"), std::string::npos);
}

TEST_F(CliTest, AssignMatchesBruteForce) {
  const auto data = write("x.csv", "x1,x2\n0.9,0.8\n0.1,0.2\n");
  const Result r = run_cli({"assign", "--data", data.string(), "--no-rescale", "-o", out()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  Matrix x(2, 2);
  x << 0.9, 0.8, 0.1, 0.2;
  const Assignment best = brute_force_assignment(x, generate_anchors(2, 2, AnchorMode::kHalton).points);
  EXPECT_EQ(r.out, "total_cost = " + format_double(best.cost) + "\n");
  const NumericTable pairs = read_table(fs::path(out()) / "pairs.csv");
  EXPECT_EQ(pairs.values(0, 1), static_cast<double>(best.sigma[0] + 1));
}

TEST_F(CliTest, AssignRandomNeedsSeed) {
  const auto data = write("x.csv", "0.9,0.8\n0.1,0.2\n");
  EXPECT_EQ(run_cli({"assign", "--data", data.string(), "--anchors", "random", "-o", out()}).code,
            cli::kExitUsage);
}

TEST_F(CliTest, SimulateIsReproducibleFromManifest) {
  const auto cfg = write("c.ini",
                         "[experiment]\ndesign = uniform_0_2, normal_1_2\nn = 40\nreps = 60\n"
                         "seed = 12\n");
  const Result r = run_cli({"simulate", "--config", cfg.string(), "--raw", "-o", out("a")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  for (const char* f : {"ecdf_uniform_0_2.csv", "ecdf_normal_1_2.csv", "ecdf_raw_uniform_0_2.csv",
                        "summary.txt", "manifest.ini"}) {
    EXPECT_TRUE(fs::exists(fs::path(out("a")) / f)) << f;
  }
  const std::string summary = slurp(fs::path(out("a")) / "summary.txt");
  EXPECT_NE(summary.find("transformed.uniform_0_2.normal_1_2"), std::string::npos) << summary;

  const Result again = run_cli(
      {"simulate", "--config", (fs::path(out("a")) / "manifest.ini").string(), "-o", out("b")});
  ASSERT_EQ(again.code, cli::kExitOk) << again.err;
  for (const char* f : {"ecdf_uniform_0_2.csv", "ecdf_normal_1_2.csv"}) {
    EXPECT_EQ(slurp(fs::path(out("a")) / f), slurp(fs::path(out("b")) / f)) << f;
  }
}

TEST_F(CliTest, SimulateOverridesAndPlotData) {
  const auto cfg = write("c.ini", "[experiment]\ndesign = uniform_0_2\nn = 40\nreps = 10\nseed = 1\n");
  const Result r = run_cli({"simulate", "-c", cfg.string(), "--reps", "7", "--set",
                            "experiment.statistic=cvm", "--plot-data", "-o", out()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(read_table(fs::path(out()) / "ecdf_uniform_0_2.csv").values.rows(), 7);
  EXPECT_EQ(read_table(fs::path(out()) / "plot_uniform_0_2.csv").values.rows(), 301);
  EXPECT_NE(slurp(fs::path(out()) / "manifest.ini").find("statistic = cvm"), std::string::npos);
}

TEST_F(CliTest, PowerWritesRejectionTable) {
  const auto cfg = write("c.ini",
                         "[experiment]\ndesign = uniform_0_2\nn = 40\nreps = 40\nseed = 2\n"
                         "[alternative]\npsi = x_squared\namplitude = 3\n"
                         "[power]\nlevels = 0.05, 0.1\n");
  const Result r = run_cli({"power", "-c", cfg.string(), "-o", out()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const std::string table = slurp(fs::path(out()) / "rejection.csv");
  EXPECT_EQ(table.rfind("design,level,critical_value,rejection_rate", 0), 0u) << table;
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 3);
}

TEST_F(CliTest, UsageErrors) {
  const auto cfg = write("c.ini", "[experiment]\ndesign = uniform_0_2\n");
  EXPECT_EQ(run_cli({"simulate", "-c", cfg.string(), "-o", out()}).code, cli::kExitUsage);
  EXPECT_FALSE(fs::exists(out()));
  EXPECT_EQ(run_cli({"simulate", "-c", cfg.string(), "--bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"fit", "--data", (dir_ / "missing.csv").string()}).code, cli::kExitUsage);
  const auto bad = write("bad.ini", "[experiment]\ndessign = uniform_0_2\nseed = 1\n");
  const Result r = run_cli({"simulate", "-c", bad.string(), "-o", out()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("dessign"), std::string::npos) << r.err;
  EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
}

TEST_F(CliTest, SingularDataIsNumericalFailure) {
  const auto data = write("d.csv", "x,y\n0,1\n0,2\n0,3\n");
  const Result r = run_cli({"fit", "--data", data.string(), "-o", out()});
  EXPECT_EQ(r.code, cli::kExitNumerical) << r.err;
  EXPECT_FALSE(fs::exists(fs::path(out()) / "theta.csv"));
}

TEST_F(CliTest, LimitsTables) {
  const Result r = run_cli({"limits", "--p", "1", "--d", "2", "--grid", "4", "-o", out()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const NumericTable k = read_table(fs::path(out()) / "kolmogorov.csv");
  EXPECT_EQ(k.values.rows(), 301);
  const NumericTable c = read_table(fs::path(out()) / "covariance.csv");
  EXPECT_EQ(c.values.rows(), 16);
  EXPECT_NEAR(c.values(15, 2), 0.0, 1e-14);
}

TEST_F(CliTest, OutputDirFromEnvironment) {
  ::setenv("DFREG_OUTPUT_DIR", out("env").c_str(), 1);
  const Result r = run_cli({"limits"});
  ::unsetenv("DFREG_OUTPUT_DIR");
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(fs::path(out("env")) / "kolmogorov.csv"));
}

}  // namespace
}  // namespace dfreg
