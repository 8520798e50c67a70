#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"

#include "bagbound/cli.hpp"

namespace bagbound {
namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(std::filesystem::temp_directory_path() / ("bagbound_cli_" + std::to_string(counter_++))) {
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string file(const std::string& name, const std::string& content = "") const {
    const auto p = (path_ / name).string();
    if (!content.empty()) std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

// ---------------------------------------------------------------------------
// usage

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  CliResult r = run({"bound", "--bogus", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "--bogus")) << r.err;
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"bound", "--problem", "nope", "--k", "5"}).code, 2);
  EXPECT_EQ(run({"bound", "--method", "bagging-u"}).code, 2);
  EXPECT_EQ(run({"bound", "--k", "5", "--B", "lots"}).code, 2);
  EXPECT_EQ(run({"bound", "--k", "50", "--n", "50"}).code, 2);
  EXPECT_EQ(run({"bound", "--k", "5", "--alpha", "2"}).code, 2);
  EXPECT_EQ(run({"bound", "--method", "batching", "--k", "30", "--n", "50"}).code, 2);
  EXPECT_EQ(run({"bound", "--k", "5", "--n", "abc"}).code, 2);
  EXPECT_EQ(run({"gap", "--approach", "lower", "--method", "single"}).code, 2);
  EXPECT_EQ(run({"experiment"}).code, 2);
  EXPECT_EQ(run({"experiment", "--config", "/nonexistent/config.json"}).code, 2);
  EXPECT_EQ(run({"dev-oracle", "--mode", "zz"}).code, 2);
  EXPECT_EQ(run({"bound", "--help"}).code, 0);
}

TEST(Cli, RuntimeErrorExitsOne) {
  const CliResult r = run({"bound", "--k", "5", "--n", "20", "--output", "/nonexistent-dir/out.json"});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.err, "/nonexistent-dir/out.json"));
}

// ---------------------------------------------------------------------------
// bound

TEST(Cli, BoundSmoke) {
  const CliResult r = run({"bound", "--problem", "cvar", "--method", "bagging-u", "--n", "50", "--k", "25", "--B", "auto",
                     "--alpha", "0.05", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "bagging-u n=50 k=25 B=6250 point="));
  EXPECT_TRUE(contains(r.out, "sigma_ij="));
  EXPECT_TRUE(contains(r.out, "lower_bound="));
  EXPECT_FALSE(contains(r.out, "warning"));
  EXPECT_EQ(r.out, run({"bound", "--n", "50", "--k", "25", "--seed", "7", "--threads", "4"}).out);
}

TEST(Cli, BoundWarnsBelowRecommendedB) {
  const CliResult r = run({"bound", "--n", "20", "--k", "5", "--B", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "B=100"));
  EXPECT_TRUE(contains(r.out, "warning: B=100 is below the recommended 5nk=500"));
}

TEST(Cli, BoundOtherMethods) {
  CliResult r = run({"bound", "--problem", "toylp", "--method", "batching", "--n", "100", "--k", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "batching n=100 k=50 m=2 point="));
  r = run({"bound", "--problem", "ip", "--method", "single", "--n", "30"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "single n=30 k=30 point="));
  r = run({"bound", "--problem", "portfolio", "--method", "bagging-v", "--n", "20", "--k", "30"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "bagging-v n=20 k=30"));
}

TEST(Cli, BoundFromDataFile) {
  TempDir dir;
  const std::string data = dir.file("data.csv", "# losses\n0\n0\n2\n2\n");
  const CliResult r = run({"bound", "--data", data, "--method", "batching", "--k", "2", "--problem", "cvar"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "batching n=4 k=2 m=2"));
  const std::string bad = dir.file("bad.csv", "1\nx\n");
  const CliResult e = run({"bound", "--data", bad, "--k", "1"});
  EXPECT_EQ(e.code, 2);
  EXPECT_TRUE(contains(e.err, "not a number")) << e.err;
  EXPECT_EQ(run({"bound", "--data", dir.file("missing.csv"), "--k", "1"}).code, 2);
}

TEST(Cli, BoundJsonReport) {
  TempDir dir;
  const std::string path = dir.file("out.json");
  ASSERT_EQ(run({"bound", "--n", "20", "--k", "5", "--output", path}).code, 0);
  const auto j = nlohmann::json::parse(read_file(path));
  EXPECT_EQ(j["problem"], "cvar");
  EXPECT_EQ(j["n"], 20);
  EXPECT_EQ(j["B"], 500);
  EXPECT_EQ(j["scheme"], "without-replacement");
  EXPECT_EQ(j["per_datum_cov"].size(), 20u);
}

TEST(Cli, BoundRepsRunsExperiment) {
  const CliResult r = run({"bound", "--n", "20", "--k", "5", "--B", "50", "--reps", "5", "--threads", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("problem,method,n,k,coverage,mean,std,reps,truth,truth_tag,seed\ncvar,bagging-u,20,5,", 0), 0u)
      << r.out;
}

// ---------------------------------------------------------------------------
// config files

TEST(Cli, ConfigSuppliesFlagsAndExplicitFlagsWin) {
  TempDir dir;
  const std::string cfg =
      dir.file("c.json", R"({"problem": "toylp", "method": "batching", "k": 10, "n": 40, "seed": 3})");
  const CliResult a = run({"bound", "--config", cfg});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_TRUE(contains(a.out, "batching n=40 k=10 m=4"));
  const CliResult b = run({"bound", "--config", cfg, "--k", "20"});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_TRUE(contains(b.out, "batching n=40 k=20 m=2"));
  const CliResult c = run({"bound", "--k", "20", "--config", cfg});
  EXPECT_EQ(c.out, b.out);
  EXPECT_EQ(run({"bound", "--config", dir.file("bad.json", R"({"k": [1, 2]})")}).code, 2);
  EXPECT_EQ(run({"bound", "--config", dir.file("bad2.json", R"({"nope": 1})")}).code, 2);
  EXPECT_EQ(run({"bound", "--config", dir.file("bad3.json", "{not json")}).code, 2);
}

// ---------------------------------------------------------------------------
// gap

TEST(Cli, GapSmoke) {
  const CliResult r = run({"gap", "--problem", "ip", "--approach", "crn", "--method", "bagging-v", "--n1", "64", "--n2", "36",
                     "--k", "18", "--alpha", "0.05"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "crn bagging-v n1=64 n2=36 gap_upper_bound="));
  EXPECT_TRUE(contains(r.out, "true_gap="));
  const CliResult bc = run({"gap", "--problem", "portfolio", "--approach", "bc", "--method", "bagging-u", "--n1", "20",
                      "--n2", "20", "--k", "10"});
  ASSERT_EQ(bc.code, 0) << bc.err;
  EXPECT_TRUE(contains(bc.out, "value_upper="));
}

TEST(Cli, GapFromDataFile) {
  TempDir dir;
  const std::string data = dir.file("d.csv", "0.1\n-0.2\n0.3\n0.05\n-0.1\n0.2\n");
  const CliResult r = run({"gap", "--problem", "toylp", "--approach", "crn", "--method", "single", "--n1", "2", "--data", data});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "n1=2 n2=4"));
  EXPECT_EQ(run({"gap", "--problem", "toylp", "--approach", "crn", "--method", "single", "--n1", "6", "--data", data}).code, 2);
}

TEST(Cli, GapReps) {
  const CliResult r = run({"gap", "--problem", "ip", "--approach", "crn", "--method", "batching", "--n1", "10", "--n2", "20",
                     "--k", "5", "--reps", "4", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["mode"], "gap-crn");
  EXPECT_EQ(j[0]["reps"], 4);
}

// ---------------------------------------------------------------------------
// experiment

TEST(Cli, ExperimentWithOverrides) {
  TempDir dir;
  const std::string cfg = dir.file("e.json", R"({"problem": "cvar", "n": 20, "replications": 50,
      "methods": [{"method": "bagging-u", "k": [4]}, {"method": "single"}], "B": 40})");
  const std::string out = dir.file("rows.json");
  const CliResult r = run({"experiment", "--config", cfg, "--replications", "6", "--seed", "5", "--output", out, "--format",
                     "json", "--threads", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "wrote 2 rows to " + out + "\n");
  const auto j = nlohmann::json::parse(read_file(out));
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["reps"], 6);
  EXPECT_EQ(j[0]["seed"], 5);
  EXPECT_EQ(j[0]["B"], 40);
  const CliResult csv = run({"experiment", "--config", cfg, "--replications", "6", "--seed", "5", "--threads", "1"});
  ASSERT_EQ(csv.code, 0) << csv.err;
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "problem,method,n,k,coverage,mean,std,reps,truth,truth_tag,seed");
  EXPECT_EQ(run({"experiment", "--config", dir.file("bad.json", R"({"n": 20, "method": "batching", "k": 15})")}).code, 2);
}

TEST(Cli, ShippedGoldenConfig) {
  TempDir dir;
  const std::string golden = std::string(BAGBOUND_SOURCE_DIR) + "/tests/golden/";
  const std::string out = dir.file("t.csv");
  ASSERT_EQ(run({"experiment", "--config", golden + "cvar_n50_small.json", "--output", out, "--threads", "8"}).code, 0);
  EXPECT_EQ(read_file(out), read_file(golden + "cvar_n50_small.csv"));
}

TEST(Cli, ShippedConfigsValidate) {
  for (const auto& entry : std::filesystem::directory_iterator(std::string(BAGBOUND_SOURCE_DIR) + "/configs")) {
    const CliResult r = run({"experiment", "--config", entry.path().string(), "--replications", "1", "--threads", "1"});
    EXPECT_EQ(r.code, 0) << entry.path() << ": " << r.err;
  }
}

// ---------------------------------------------------------------------------
// dev-oracle

TEST(Cli, DevOracle) {
  CliResult r = run({"dev-oracle", "--mode", "u", "--problem", "cvar", "--n", "8", "--k", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "u n=8 k=3 value="));
  EXPECT_TRUE(contains(r.out, "evaluations=56"));
  r = run({"dev-oracle", "--mode", "v", "--problem", "toylp", "--n", "5", "--k", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "evaluations=125"));
  r = run({"dev-oracle", "--mode", "wk", "--problem", "cvar", "--k", "10", "--reps", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "wk k=10 value="));
  r = run({"dev-oracle", "--mode", "gk", "--problem", "example1", "--d", "3", "--k", "20", "--outer", "100", "--inner",
           "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "k2var="));
  r = run({"dev-oracle", "--mode", "covariance", "--d", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run({"dev-oracle", "--mode", "portfolio-truth"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "portfolio truth="));
  EXPECT_EQ(run({"dev-oracle", "--mode", "u", "--problem", "cvar", "--n", "40", "--k", "20"}).code, 2);
}

}  // namespace
}  // namespace bagbound
