#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <iterator>

#include "support.hpp"

namespace fs = std::filesystem;
using jumpvel::test::TempDir;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

Run run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path log = scratch / "cli.log";
  const std::string cmd = std::string("\"") + JUMPVEL_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream is(log);
  r.output.assign(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
  return r;
}

std::size_t line_count(const fs::path& p) {
  std::ifstream is(p);
  std::size_t n = 0;
  for (std::string line; std::getline(is, line);) ++n;
  return n;
}

}  // namespace

TEST(Cli, NoArgumentsIsUsageError) {
  TempDir dir("cli_noargs");
  const auto r = run_cli("", dir.path());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("cross-validate"), std::string::npos);
}

TEST(Cli, BadFlagIsUsageError) {
  TempDir dir("cli_badflag");
  EXPECT_EQ(run_cli("cross-validate --data x --report-dir y --view top", dir.path()).code, 1);
  EXPECT_EQ(run_cli("gen-data --participants 3", dir.path()).code, 1);
  EXPECT_EQ(run_cli("frobnicate", dir.path()).code, 1);
}

TEST(Cli, MissingDatasetIsRuntimeError) {
  TempDir dir("cli_missing");
  const auto r = run_cli("cross-validate --data \"" + (dir.path() / "nowhere").string() + "\" --report-dir \"" +
                             (dir.path() / "out").string() + "\"",
                         dir.path());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("nowhere"), std::string::npos);
}

TEST(Cli, GradcheckPasses) {
  TempDir dir("cli_gradcheck");
  const auto r = run_cli("gradcheck", dir.path());
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(r.output.find("FAIL"), std::string::npos);
  EXPECT_NE(r.output.find("seed: 0"), std::string::npos);
}

TEST(Cli, GenerateThenCrossValidate) {
  TempDir dir("cli_pipeline");
  const fs::path data = dir.path() / "data";
  const fs::path out = dir.path() / "report";
  auto r = run_cli("gen-data --out \"" + data.string() + "\" --participants 6 --frames 2 --seed 9", dir.path());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(line_count(data / "manifest.tsv"), 12u);

  r = run_cli("cross-validate --data \"" + data.string() + "\" --view center --epochs 1 --seed 2 --report-dir \"" +
                  out.string() + "\"",
              dir.path());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("config:"), std::string::npos);
  EXPECT_NE(r.output.find("seed: 2"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "metrics.tsv"));
  EXPECT_TRUE(fs::exists(out / "folds.tsv"));
  for (int k = 0; k < 3; ++k) {
    EXPECT_TRUE(fs::exists(out / ("scatter_fold" + std::to_string(k) + ".tsv")));
    EXPECT_TRUE(fs::exists(out / ("hist_fold" + std::to_string(k) + ".tsv")));
  }
}

TEST(Cli, TrainSaveThenEval) {
  TempDir dir("cli_train");
  const fs::path data = dir.path() / "data";
  const fs::path model = dir.path() / "model.ckpt";
  ASSERT_EQ(run_cli("gen-data --out \"" + data.string() + "\" --participants 3 --frames 2", dir.path()).code, 0);
  auto r = run_cli("train --data \"" + data.string() + "\" --view left --epochs 2 --out \"" + model.string() + "\"",
                   dir.path());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(model));
  r = run_cli("eval --data \"" + data.string() + "\" --model \"" + model.string() + "\"", dir.path());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("samples 6"), std::string::npos);
}
