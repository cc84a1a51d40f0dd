#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("fblf_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& content) const {
    const fs::path path = dir_ / name;
    std::ofstream(path) << content;
    return path;
  }

  // Runs the CLI with stdout and stderr captured to files; returns the exit code.
  int cli(const std::string& args) {
    const std::string cmd = "cd '" + dir_.string() + "' && '" FBLF_CLI_PATH "' " + args +
                            " >stdout.txt 2>stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const fs::path& path) const {
    std::ifstream in(path.is_absolute() ? path : dir_ / path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  static std::size_t line_count(const std::string& text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  }

  fs::path dir_;
};

constexpr const char* kQuickConfig =
    "model = scalar-I\n"
    "b_V = 0.5\n"
    "K = 30\n"
    "N = 200\n";

TEST_F(CliTest, MissingConfigIsAnError) {
  EXPECT_EQ(cli("simulate does-not-exist.ini"), 1);
  EXPECT_NE(read("stderr.txt").find("does-not-exist.ini"), std::string::npos);
}

TEST_F(CliTest, SummaryHasOneRowPerIteration) {
  write("run.ini", kQuickConfig);
  ASSERT_EQ(cli("simulate run.ini --out result"), 0) << read("stderr.txt");
  const std::string summary = read("result/summary.csv");
  EXPECT_EQ(line_count(summary), 31u);
  EXPECT_EQ(summary.rfind("k,sup_e,sup_V,L_T,delta_L,violations\n", 0), 0u);
  EXPECT_EQ(line_count(read("result/trace.csv")), 1u + 30u * 201u);
  EXPECT_TRUE(fs::exists(dir_ / "result/memory.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "result/convergence.svg"));
}

TEST_F(CliTest, SvgFlagWritesPlots) {
  write("run.ini", "model = scalar-II\nK = 3\nN = 100\n");
  ASSERT_EQ(cli("simulate run.ini --out plots --svg"), 0) << read("stderr.txt");
  EXPECT_NE(read("plots/convergence.svg").find("</svg>"), std::string::npos);
  EXPECT_NE(read("plots/constraint.svg").find("</svg>"), std::string::npos);
}

TEST_F(CliTest, NonPositiveBoundNamesTheField) {
  write("bad.ini", "model = scalar-I\nb_V = 0\n");
  EXPECT_EQ(cli("simulate bad.ini"), 1);
  EXPECT_NE(read("stderr.txt").find("b_V"), std::string::npos);
}

TEST_F(CliTest, BreachGivesExitTwo) {
  // A 0.5 rad step under a tiny barrier cannot stay inside on a coarse grid.
  write("breach.ini", "model = scalar-I\nb_V = 1e-6\nK = 2\nN = 4\n");
  EXPECT_EQ(cli("simulate breach.ini --out b"), 2);
  const std::string summary = read("b/summary.csv");
  EXPECT_NE(summary.find(",1\n"), std::string::npos);
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  write("run.ini", "model = scalar-II\ntheorem = 2\neps = 1e-2\nK = 5\nN = 300\n");
  ASSERT_EQ(cli("simulate run.ini --out a"), 0);
  ASSERT_EQ(cli("simulate run.ini --out b"), 0);
  for (const char* file : {"trace.csv", "summary.csv", "memory.csv"}) {
    const std::string first = read(fs::path("a") / file);
    EXPECT_FALSE(first.empty());
    EXPECT_EQ(first, read(fs::path("b") / file)) << file;
  }
}

TEST_F(CliTest, SeveralConfigsGetTheirOwnDirectories) {
  write("one.ini", "K = 2\nN = 50\n");
  write("two.ini", "model = scalar-II\nK = 2\nN = 50\n");
  ASSERT_EQ(cli("simulate one.ini two.ini --out many --jobs 2"), 0) << read("stderr.txt");
  EXPECT_TRUE(fs::exists(dir_ / "many/one/summary.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "many/two/summary.csv"));
}

TEST_F(CliTest, CompareBlfAtUnitBound) {
  EXPECT_EQ(cli("compare-blf 1.0 --out blf --samples 2000"), 0) << read("stderr.txt");
  const std::string csv = read("blf/blf_report.csv");
  EXPECT_EQ(csv.rfind("check,lo,hi,b_V,applicable,holds,value\n", 0), 0u);
  EXPECT_NE(read("stdout.txt").find("holds"), std::string::npos);
}

TEST_F(CliTest, CompareBlfRejectsNonPositiveBound) {
  EXPECT_EQ(cli("compare-blf 1.0 0"), 1);
  EXPECT_NE(read("stderr.txt").find("b_V"), std::string::npos);
}

TEST_F(CliTest, CheckLemmas) {
  std::ostringstream halving, increasing;
  halving.precision(17);
  halving << "r,s\n";
  increasing << "r,s\n";
  for (int k = 0; k < 20; ++k) {
    halving << std::ldexp(1.0, -k) << ',' << std::ldexp(1.0, -k) << '\n';
    increasing << k << ",1\n";
  }
  write("halving.csv", halving.str());
  write("increasing.csv", increasing.str());
  write("broken.csv", "r,s\n1,oops\n");
  write("perturbed.csv", "r,s,d\n0.3,0.3,0.3\n0.3,0.3,0.3\n0.3,0.3,0.3\n0.3,0.3,0.3\n");
  EXPECT_EQ(cli("check-lemmas halving.csv"), 0);
  EXPECT_EQ(cli("check-lemmas increasing.csv"), 3);
  EXPECT_EQ(cli("check-lemmas broken.csv"), 1);
  EXPECT_EQ(cli("check-lemmas perturbed.csv --d-bar 0.3"), 0);
  EXPECT_EQ(cli("check-lemmas perturbed.csv --d-bar 0.1"), 3);
  EXPECT_EQ(cli("check-lemmas missing.csv"), 1);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(cli(""), 1);
  EXPECT_EQ(cli("frobnicate"), 1);
  EXPECT_EQ(cli("--help"), 0);
}

}  // namespace
