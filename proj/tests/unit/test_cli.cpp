#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"
#include "mssc/mssc_test.hpp"
#include "mssc/panel_io.hpp"

namespace {

namespace fs = std::filesystem;
using namespace mssc;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("mssc_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) {
    const std::string cmd = std::string(MSSC_CLI_PATH) + " " + args + " >" + path("stdout") +
                            " 2>" + path("stderr");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string slurp(const std::string& name) const {
    std::ifstream is(path(name), std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(Cli, SimulateBinaryThenTestMatchesLibrary) {
  ASSERT_EQ(run("simulate -M 4 -N 200 --theta 0.5 --seed 3 --out " + path("p.bin")), 0);
  ASSERT_EQ(run("test " + path("p.bin") + " -B 20 --out " + path("r.json")), 0);
  const auto j = nlohmann::json::parse(slurp("r.json"));
  const TestReport lib = mssc_test(read_panel(path("p.bin"), PanelFormat::Binary), 20, 0.05);
  EXPECT_EQ(j["value"].get<double>(), lib.value);
  EXPECT_EQ(j["threshold"].get<double>(), lib.threshold);
  EXPECT_EQ(j["p_value"].get<double>(), lib.p_value);
  EXPECT_EQ(j["reject"].get<bool>(), lib.reject);
  EXPECT_EQ(j["config"]["M"], 4);
  EXPECT_EQ(j["argmax"]["i"].get<Index>(), lib.argmax->i + 1);
}

TEST_F(Cli, LocalAlternativeIsRejected) {
  ASSERT_EQ(run("simulate -M 4 -N 400 --theta 0.5 --beta 0.9 --variant H1loc --out " + path("p.csv")), 0);
  ASSERT_EQ(run("test " + path("p.csv") + " -B 20 --out " + path("r.json")), 0);
  EXPECT_TRUE(nlohmann::json::parse(slurp("r.json"))["reject"].get<bool>());
}

TEST_F(Cli, LssTestUsesMonteCarloThreshold) {
  ASSERT_EQ(run("simulate -M 3 -N 100 --out " + path("p.csv")), 0);
  ASSERT_EQ(run("test " + path("p.csv") + " -B 10 --statistic frob --reps 100 --out " + path("r.json")), 0);
  const auto j = nlohmann::json::parse(slurp("r.json"));
  EXPECT_EQ(j["statistic"], "FROB");
  EXPECT_EQ(j["calibration"]["n_reps"], 100);
  EXPECT_GT(j["p_value"].get<double>(), 0.0);
}

TEST_F(Cli, ExitCodes) {
  ASSERT_EQ(run("simulate -M 2 -N 50 --out " + path("p.csv")), 0);
  EXPECT_EQ(run("test " + path("p.csv") + " -B 3"), 1);
  EXPECT_EQ(run("test " + path("missing.csv") + " -B 4"), 1);
  EXPECT_EQ(run("no-such-verb"), 1);
  EXPECT_EQ(run("type1 --ladder 50,4,1 --reps 5"), 1);
  EXPECT_EQ(run("calibrate-beta -M 100 --variant H1loc --r-target 0.3"), 2);

  std::ofstream os(path("zero.csv"));
  os << "series_1_re,series_1_im,series_2_re,series_2_im\n";
  for (int n = 0; n < 20; ++n) os << n % 3 << ",1,0,0\n";
  os.close();
  EXPECT_EQ(run("test " + path("zero.csv") + " -B 4"), 2);

  std::ofstream bad(path("bad.csv"));
  bad << "series_1_re,series_1_im\n1,2\nx,2\n";
  bad.close();
  EXPECT_EQ(run("test " + path("bad.csv") + " -B 0"), 1);
  EXPECT_NE(slurp("stderr").find("row 3"), std::string::npos);
}

TEST_F(Cli, ExperimentOutputsAreByteIdenticalAcrossParallelism) {
  const std::string common = " --ladder '64,6,4;80,8,5' --reps 30 --calib-reps 100 --statistics mssc,frob --seed 9";
  ASSERT_EQ(run("type1" + common + " --parallel 1 --out " + path("a")), 0);
  ASSERT_EQ(run("type1" + common + " --parallel 4 --out " + path("b")), 0);
  EXPECT_EQ(slurp("a.json"), slurp("b.json"));
  EXPECT_EQ(slurp("a_table.csv"), slurp("b_table.csv"));
  const auto j = nlohmann::json::parse(slurp("a.json"));
  EXPECT_EQ(j["results"].size(), 4u);
}

TEST_F(Cli, ConfigFileAndOtherVerbs) {
  std::ofstream cfg(path("cfg.json"));
  cfg << R"({"ladder": [{"N": 64, "B": 6, "M": 3}], "theta": 0.6, "n_reps": 4, "seed": 2})";
  cfg.close();
  EXPECT_EQ(run("gumbel-fit --config " + path("cfg.json") + " --out " + path("g")), 0);
  EXPECT_TRUE(fs::exists(path("g_ecdf.csv")));
  EXPECT_EQ(run("bartlett-gap --config " + path("cfg.json") + " --out " + path("bg")), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp("bg.json"))["config"]["theta"], 0.6);
  EXPECT_EQ(run("roc --config " + path("cfg.json") + " --beta 0.5 --calib-reps 100 --out " + path("roc")), 0);
  EXPECT_TRUE(fs::exists(path("roc_roc.csv")));
  EXPECT_EQ(run("power --config " + path("cfg.json") + " --r-target 0.05 --calib-reps 100 --out " + path("pw")), 0);
  EXPECT_EQ(run("calibrate-beta -M 20 --r-target 0.01 --out " + path("cb.json")), 0);
  const auto cb = nlohmann::json::parse(slurp("cb.json"));
  EXPECT_NEAR(cb["r"].get<double>(), 0.01, 1e-6);
}

TEST_F(Cli, ReportReplaysFromItsOwnJson) {
  ASSERT_EQ(run("type1 --ladder 64,6,4 --reps 12 --seed 5 --out " + path("a")), 0);
  ASSERT_EQ(run("type1 --config " + path("a.json") + " --out " + path("b")), 0);
  EXPECT_EQ(slurp("a.json"), slurp("b.json"));
}

}  // namespace
