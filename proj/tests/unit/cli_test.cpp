#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "amspec_cli/cli.hpp"
#include "amspec_cli/worker_pool.hpp"

namespace amspec::cli {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out, err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) cells.push_back(cell);
  return cells;
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(fs::temp_directory_path() / "amspec_cli_test");
    fs::create_directories(*dir_);
    ASSERT_EQ(run({"construct", "--alpha", "golden", "--phi", "c1=0.3", "-o", path("edge.json")}).code, 0);
    ASSERT_EQ(run({"construct", "--alpha", "golden", "--phi", "c1=0", "-o", path("free.json")}).code, 0);
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
  }
  static std::string path(const std::string& name) { return (*dir_ / name).string(); }

  static fs::path* dir_;
};

fs::path* CliTest::dir_ = nullptr;

TEST_F(CliTest, ConstructWritesCertifiedModel) {
  std::ifstream in(path("edge.json"));
  const nlohmann::json j = nlohmann::json::parse(in);
  EXPECT_EQ(j["alpha"]["tag"], "golden");
  for (const auto& [name, value] : j["meta"]["residuals"].items()) EXPECT_LT(value.get<double>(), 1e-9) << name;
  EXPECT_EQ(j["meta"]["run"]["command"], "construct");
  EXPECT_GT(j["meta"]["frequency"]["brjuno_partial_sum"].get<double>(), 0.0);
}

TEST_F(CliTest, ConstructFreeModelHasZeroForce) {
  std::ifstream in(path("free.json"));
  const nlohmann::json j = nlohmann::json::parse(in);
  for (double v : j["f"]["re"].get<std::vector<double>>()) EXPECT_EQ(v, 0.0);
  for (double v : j["f"]["im"].get<std::vector<double>>()) EXPECT_EQ(v, 0.0);
}

TEST_F(CliTest, RationalAlphaIsUsageError) {
  const CliRun r = run({"construct", "--alpha", "0.5", "--phi", "c1=0.3"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("InvalidArgument"), std::string::npos);
  EXPECT_EQ(run({"construct", "--phi", "c1=0.3"}).code, kExitUsage);
  EXPECT_EQ(run({"nonsense"}).code, kExitUsage);
}

TEST_F(CliTest, VerifyPassesOnCertifiedModels) {
  for (const char* name : {"free.json", "edge.json"}) {
    const CliRun r = run({"verify", "--model", path(name)});
    EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
  }
}

TEST_F(CliTest, VerifyFlagsPerturbedGamma) {
  nlohmann::json j;
  {
    std::ifstream in(path("edge.json"));
    j = nlohmann::json::parse(in);
  }
  const int n = j["gamma"]["series"]["n_modes"];
  j["gamma"]["series"]["re"][n + 1] = j["gamma"]["series"]["re"][n + 1].get<double>() + 0.005;
  j["gamma"]["series"]["re"][n - 1] = j["gamma"]["series"]["re"][n - 1].get<double>() + 0.005;
  {
    std::ofstream out(path("bad.json"));
    out << j.dump();
  }
  const CliRun r = run({"verify", "--model", path("bad.json")});
  EXPECT_EQ(r.code, kExitFail);
  bool invariance_failed = false;
  for (const auto& line : data_lines(r.out)) {
    if (line.rfind("invariance,", 0) == 0) invariance_failed = line.find("FAIL") != std::string::npos;
  }
  EXPECT_TRUE(invariance_failed) << r.out;
}

TEST_F(CliTest, VerifyRejectsBadInput) {
  EXPECT_EQ(run({"verify", "--model", path("missing.json")}).code, kExitUsage);
  EXPECT_EQ(run({"verify", "--model", path("edge.json"), "--tol", "nonexistent=1"}).code, kExitUsage);
}

TEST_F(CliTest, MinimizeWritesOrbitTable) {
  const CliRun r = run({"minimize", "--model", path("edge.json"), "--p", "3", "--q", "5", "-o", path("orbit.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::ifstream in(path("orbit.csv"));
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto lines = data_lines(text);
  ASSERT_GE(lines.size(), 6u);
  EXPECT_EQ(lines[0], "n,x,r,residual");
  EXPECT_EQ(split(lines[1]).size(), 4u);
  EXPECT_NE(text.find("# run: "), std::string::npos);
  EXPECT_NE(text.find("# model_hash: "), std::string::npos);

  EXPECT_EQ(run({"minimize", "--standard", "0.5", "--p", "2", "--q", "4"}).code, kExitUsage);
}

TEST_F(CliTest, CocycleReportsEdgeBehaviour) {
  const CliRun r = run({"cocycle", "--model", path("edge.json"), "--energy", "0", "--iters", "20000"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j["uh"].get<bool>());
  EXPECT_LT(std::abs(j["rotation"].get<double>()), 1e-3);
}

TEST_F(CliTest, FreeSweepFindsBandExactly) {
  const CliRun r = run({"sweep", "--model", path("free.json"), "--emin", "-4.5", "--emax", "0.5", "--points", "101",
                     "--iters", "2000", "--size", "200"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 102u);
  const auto header = split(lines[0]);
  const auto uh_col = std::find(header.begin(), header.end(), "uh") - header.begin();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i]);
    const double e = std::stod(cells[0]);
    const bool outside = e < -4.0 || e > 0.0;
    EXPECT_EQ(cells[uh_col] == "true", outside) << lines[i];
  }
}

TEST_F(CliTest, EdgeSweepSplitsAtZero) {
  const CliRun r = run({"sweep", "--model", path("edge.json"), "--emin", "-0.2", "--emax", "0.1", "--points", "31",
                     "--iters", "10000", "--size", "200"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto lines = data_lines(r.out);
  const auto header = split(lines[0]);
  const auto uh_col = std::find(header.begin(), header.end(), "uh") - header.begin();
  bool saw_zero = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i]);
    const double e = std::stod(cells[0]);
    if (e > 0.0) EXPECT_EQ(cells[uh_col], "true") << lines[i];
    if (e == 0.0) {
      saw_zero = true;
      EXPECT_EQ(cells[uh_col], "false") << lines[i];
    }
  }
  EXPECT_TRUE(saw_zero);
}

TEST_F(CliTest, OutputIndependentOfWorkerCount) {
  const std::vector<std::string> base{"sweep", "--model", path("edge.json"), "--emin", "-1", "--emax", "0.2",
                                      "--points", "16", "--iters", "3000", "--size", "150"};
  auto with = [&](const char* workers) {
    auto args = base;
    args.insert(args.end(), {"--parallelism", workers});
    return run(args);
  };
  const CliRun one = with("1");
  const CliRun eight = with("8");
  ASSERT_EQ(one.code, kExitOk);
  EXPECT_EQ(one.out, eight.out);

  setenv("AMSPEC_WORKERS", "4", 1);
  const CliRun env = with("1");
  unsetenv("AMSPEC_WORKERS");
  EXPECT_EQ(env.out, one.out);
}

TEST_F(CliTest, SpectrumTableHasExpectedColumns) {
  const CliRun r = run({"spectrum", "--model", path("edge.json"), "--size", "200", "--emin", "-1", "--emax", "0",
                     "--grid", "5", "--iters", "2000"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0], "E,ids_counting,ids_rotation,lyapunov,rotation,uh");
}

TEST_F(CliTest, InterruptedSweepIsMarkedTruncated) {
  interrupt_flag().store(true);
  const CliRun r = run({"sweep", "--model", path("free.json"), "--emin", "-1", "--emax", "0", "--points", "5",
                     "--iters", "1000", "--size", "50"});
  interrupt_flag().store(false);
  EXPECT_EQ(r.code, kExitFail);
  EXPECT_NE(r.out.find("# truncated: 0 of 5 rows written"), std::string::npos) << r.out;
}

TEST(WorkerPool, StopLeavesContiguousPrefixOnOneWorker) {
  std::atomic<bool> stop{false};
  const auto results = parallel_map<int>(10, 1, stop, [&](std::size_t i) {
    if (i == 3) stop.store(true);
    return static_cast<int>(i * i);
  });
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(results[i].has_value(), i <= 3) << i;
  EXPECT_EQ(*results[3], 9);
}

TEST(WorkerPool, ResultsKeepIndexOrderAcrossThreads) {
  std::atomic<bool> stop{false};
  const auto results = parallel_map<std::size_t>(100, 8, stop, [](std::size_t i) { return 3 * i; });
  for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(*results[i], 3 * i);
}

TEST(WorkerPool, FirstExceptionPropagates) {
  std::atomic<bool> stop{false};
  EXPECT_THROW(parallel_map<int>(5, 2, stop,
                                 [](std::size_t i) -> int {
                                   if (i == 2) throw std::runtime_error("boom");
                                   return 0;
                                 }),
               std::runtime_error);
}

}  // namespace
}  // namespace amspec::cli
