#include "pipefair/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace pipefair;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "pipefair");
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pipefair_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    canonical_ = (fs::path(PIPEFAIR_DATA_DIR) / "canonical.scenario").string();
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  std::string variant(const std::string& from, const std::string& to) {
    std::string text = slurp(canonical_);
    const auto pos = text.find(from);
    if (pos != std::string::npos) text.replace(pos, from.size(), to);
    return write("variant.scenario", text);
  }

  fs::path dir_;
  std::string canonical_;
};

}  // namespace

TEST_F(CliTest, HelpAndVersion) {
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, kExitOk);
  EXPECT_NE(v.out.find("pipefair"), std::string::npos);
  EXPECT_EQ(run({}).code, kExitInputError);
  EXPECT_EQ(run({"frobnicate"}).code, kExitInputError);
}

TEST_F(CliTest, PosteriorCanonical) {
  const auto r = run({"posterior", canonical_, "--group", "1", "--beta", "0", "--grade", "0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("closed_form_mean = 0.325735007935"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("quadrature_mean = 0.325735007935"), std::string::npos) << r.out;
}

TEST_F(CliTest, PosteriorAdmitAllSentinel) {
  const auto r = run({"posterior", canonical_, "--beta=-inf", "--grade", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("closed_form_mean = 1\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, PosteriorStepRule) {
  const auto r = run({"posterior", canonical_, "--rule", "step:0:0.5,2:1", "--grade", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("reduction_mean = 0.794981079514"), std::string::npos) << r.out;
}

TEST_F(CliTest, MissingGammaIsParseError) {
  const auto r = run({"posterior", variant("gamma = 1\n", ""), "--grade", "0"});
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_NE(r.err.find("gamma"), std::string::npos);
}

TEST_F(CliTest, MissingFileIsInputError) {
  EXPECT_EQ(run({"audit", (dir_ / "nope.scenario").string()}).code, kExitInputError);
}

TEST_F(CliTest, CalibrateIgm) {
  const auto r = run({"calibrate", canonical_, "--mode", "igm"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("converged = true"), std::string::npos);

  const auto same = run({"calibrate", variant("pop2.mu = -1", "pop2.mu = 0"), "--mode", "igm"});
  ASSERT_EQ(same.code, kExitOk);
  const auto b1 = same.out.find("beta1 = "), b2 = same.out.find("beta2 = ");
  EXPECT_EQ(same.out.substr(b1 + 8, same.out.find('\n', b1) - b1 - 8),
            same.out.substr(b2 + 8, same.out.find('\n', b2) - b2 - 8));
}

TEST_F(CliTest, CalibratePreconditions) {
  EXPECT_EQ(run({"calibrate", variant("gamma = 1", "gamma = 2"), "--mode", "eo-gamma1"}).code,
            kExitInputError);
  const auto ng = run({"calibrate", canonical_, "--mode", "no-grades"});
  EXPECT_EQ(ng.code, kExitInputError);
  EXPECT_NE(ng.err.find("disclose = false"), std::string::npos);
  EXPECT_EQ(run({"calibrate", canonical_, "--mode", "magic"}).code, kExitInputError);
  EXPECT_EQ(run({"calibrate", canonical_, "--mode", "igm", "--cost-min", "0.3", "--cost-max", "0.7"}).code,
            kExitInputError);
}

TEST_F(CliTest, CalibrateOtherModes) {
  const auto nl = run({"calibrate", canonical_, "--mode", "noiseless", "--cost-min", "0", "--cost-max", "1"});
  ASSERT_EQ(nl.code, kExitOk);
  EXPECT_NE(nl.out.find("rule = threshold:1"), std::string::npos);

  const auto eo = run({"calibrate", canonical_, "--mode", "eo-gamma1"});
  EXPECT_TRUE(eo.code == kExitOk || eo.code == kExitNotConverged);
  EXPECT_NE(eo.out.find("converged = "), std::string::npos);

  std::string text = slurp(canonical_);
  text.replace(text.find("disclose = true"), 15, "disclose = false");
  const auto ng = run({"calibrate", write("ng.scenario", text), "--mode", "no-grades"});
  EXPECT_EQ(ng.code, kExitOk) << ng.err;
}

TEST_F(CliTest, AuditWithCsv) {
  const auto csv = (dir_ / "audit.csv").string();
  const auto r = run({"audit", canonical_, "--csv", csv});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto text = slurp(csv);
  EXPECT_EQ(text.rfind("# tool = pipefair", 0), 0u);
  EXPECT_NE(text.find("# subcommand = audit"), std::string::npos);
  EXPECT_NE(text.find("\nmetric,value,argmax,grid_lo,grid_hi,grid_points\n"), std::string::npos);
  EXPECT_NE(text.find("\neo_gap,"), std::string::npos);
  EXPECT_FALSE(fs::exists(csv + ".tmp"));
}

TEST_F(CliTest, AuditIdenticalPriorsIsZero) {
  const auto r = run({"audit", variant("pop2.mu = -1", "pop2.mu = 0")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("eo_gap = 0\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("igm_violation = 0\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("sigm_gap = 0\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, AuditRejectsBadExam) {
  EXPECT_EQ(run({"audit", canonical_, "--exam", "oral"}).code, kExitInputError);
  EXPECT_EQ(run({"audit", canonical_, "--rule1", "ramp:3"}).code, kExitInputError);
}

TEST_F(CliTest, SweepCardinalityAndDeterminism) {
  const auto a = run({"sweep", canonical_, "--grid1", "-1:1:3", "--grid2", "-1:1:3", "--threads", "1"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  int rows = 0;
  std::istringstream in(a.out);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#' && line.rfind("beta1,", 0) != 0) ++rows;
  }
  EXPECT_EQ(rows, 9);
  const auto b = run({"sweep", canonical_, "--grid1", "-1:1:3", "--grid2", "-1:1:3", "--threads", "1"});
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, SweepIdenticalPriorsMinimumOnDiagonal) {
  const auto csv = (dir_ / "sweep.csv").string();
  const auto r = run({"sweep", variant("pop2.mu = -1", "pop2.mu = 0"), "--grid1", "-1:1:3", "--grid2",
                      "-1:1:3", "--cost-min", "0.3", "--cost-max", "0.7", "--csv", csv});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("minimum = 0\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("argmin_beta1 = -1\nargmin_beta2 = -1\n"), std::string::npos) << r.out;
  EXPECT_NE(slurp(csv).find("beta1,beta2,metric,value,argmax\n"), std::string::npos);
}

TEST_F(CliTest, SweepBadGrid) {
  EXPECT_EQ(run({"sweep", canonical_, "--grid1", "1:0:3"}).code, kExitInputError);
  EXPECT_EQ(run({"sweep", canonical_, "--target", "everything"}).code, kExitInputError);
}

TEST_F(CliTest, McCheck) {
  EXPECT_EQ(run({"mc-check", canonical_, "--samples=10"}).code, kExitInputError);
  const auto csv = (dir_ / "mc.csv").string();
  const auto a = run({"mc-check", canonical_, "--samples", "400000", "--seed", "5", "--threads", "1",
                      "--csv", csv});
  EXPECT_EQ(a.code, kExitOk) << a.out;
  EXPECT_NE(a.out.find("result = PASS"), std::string::npos);
  const auto b = run({"mc-check", canonical_, "--samples", "400000", "--seed", "5", "--threads", "2"});
  EXPECT_EQ(a.out, b.out);
  const auto text = slurp(csv);
  EXPECT_NE(text.find("# seed = 5"), std::string::npos);
  EXPECT_NE(text.find("check,group,closed_form,mc_estimate,std_error,n_effective,seed,status"),
            std::string::npos);
}
