#include "ghkit/cli.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

using namespace ghkit;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "ghkit_cli_test";
    fs::create_directories(dir_);
    write_space("seg2.json", {{0, 2}, {2, 0}}, 0);
    write_space("seg1.json", {{0, 1}, {1, 0}}, 0);
    write_space("pt.json", {{0}}, 0);
    write_space("path3.json", {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}, 0);
    std::ofstream bad(dir_ / "bad.json");
    bad << "{\"n\": 3, \"d\": [[0,1,3],[1,0,1],[3,1,0]]}\n";
  }

  void write_space(const std::string& name,
                   const std::vector<std::vector<double>>& d,
                   std::optional<int> base) {
    Json j;
    j["n"] = static_cast<int>(d.size());
    j["d"] = d;
    if (base) j["base"] = *base;
    std::ofstream os(dir_ / name);
    dump_json(j, os);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args, std::string* output = nullptr) {
    std::ostringstream out, err;
    const int code = cli::run(std::move(args), out, err);
    if (output) *output = out.str();
    return code;
  }

  Json run_json(std::vector<std::string> args, int expect_code = 0) {
    std::string text;
    const int code = run(std::move(args), &text);
    EXPECT_EQ(code, expect_code) << text;
    return Json::parse(text);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, ValidateGoodAndBad) {
  const Json good = run_json({"validate", path("seg2.json")});
  EXPECT_TRUE(good.at("valid").get<bool>());
  EXPECT_EQ(good.at("n").get<int>(), 2);
  EXPECT_DOUBLE_EQ(good.at("diameter").get<double>(), 2.0);

  const Json bad = run_json({"validate", path("bad.json")}, 1);
  EXPECT_EQ(bad.at("error").get<std::string>(), "TriangleViolation");
  EXPECT_EQ(bad.at("indices").get<std::vector<int>>(), (std::vector<int>{0, 2, 1}));
}

TEST_F(CliTest, UsageErrors) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::run({"gh"}, out, err), 2);
  EXPECT_EQ(cli::run({"nonsense"}, out, err), 2);
}

TEST_F(CliTest, GhValueIntervalWitness) {
  const Json j = run_json({"gh", path("seg2.json"), path("pt.json"), "--witness-out",
                           path("witness.json")});
  EXPECT_DOUBLE_EQ(j.at("value").get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(j.at("interval")[0].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(j.at("interval")[1].get<double>(), 4.0);
  ASSERT_TRUE(j.contains("witness_file"));

  // The emitted witness re-validates.
  std::ifstream in(path("witness.json"));
  Json w;
  in >> w;
  const SpaceFile x = read_space_file(path("seg2.json"));
  const SpaceFile y = read_space_file(path("pt.json"));
  std::vector<double> cross;
  for (const auto& row : w.at("cross"))
    for (const auto& v : row) cross.push_back(v.get<double>());
  EXPECT_NO_THROW(validate_admissible(x.space, y.space, cross));

  const Json pointed =
      run_json({"gh", path("path3.json"), path("pt.json"), "--pointed"});
  EXPECT_NEAR(pointed.at("value").get<double>(), 2.0, 1e-9);

  const Json bounds =
      run_json({"gh", path("seg2.json"), path("seg1.json"), "--bounds-only"});
  EXPECT_FALSE(bounds.contains("value"));
  EXPECT_DOUBLE_EQ(bounds.at("interval")[0].get<double>(), 0.5);
}

TEST_F(CliTest, HausdorffWitnesses) {
  const Json j =
      run_json({"hausdorff", path("path3.json"), "--a", "0", "--b", "0,2"});
  EXPECT_DOUBLE_EQ(j.at("value").get<double>(), 2.0);
  const Json p = run_json({"hausdorff", path("path3.json"), "--a", "0,2", "--b",
                           "0,2", "--base-a", "0", "--base-b", "2"});
  EXPECT_DOUBLE_EQ(p.at("value").get<double>(), 2.0);
}

TEST_F(CliTest, ApproxSandwich) {
  const Json j = run_json({"approx", path("seg2.json"), path("seg1.json")});
  EXPECT_DOUBLE_EQ(j.at("defect").get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(j.at("sandwich")[0].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(j.at("sandwich")[1].get<double>(), 2.0);
}

TEST_F(CliTest, GlueOutputsCrossAndObjectives) {
  const Json j = run_json({"glue", path("seg2.json"), path("seg2.json"), "--map",
                           "0:0,1:1", "--eps", "1.0"});
  EXPECT_DOUBLE_EQ(j.at("hausdorff").get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(j.at("cross")[0][0].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(j.at("pointed").get<double>(), 1.0);
}

TEST_F(CliTest, RestrictAndIsometry) {
  const Json r = run_json({"restrict", path("path3.json"), "--indices", "0,2"});
  EXPECT_EQ(r.at("n").get<int>(), 2);
  EXPECT_DOUBLE_EQ(r.at("d")[0][1].get<double>(), 2.0);

  const Json iso = run_json({"isometry", path("seg2.json"), path("seg2.json")});
  EXPECT_TRUE(iso.at("isometric").get<bool>());
  const Json niso = run_json({"isometry", path("seg2.json"), path("seg1.json")});
  EXPECT_FALSE(niso.at("isometric").get<bool>());
}

TEST_F(CliTest, LengthCurve) {
  const Json j = run_json(
      {"length", path("path3.json"), "--from", "0", "--to", "2", "--depth", "1"});
  EXPECT_EQ(j.at("curve").get<std::vector<int>>(), (std::vector<int>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(j.at("length").get<double>(), 2.0);
}

TEST_F(CliTest, GenValidatesRoundTrip) {
  const Json gen = run_json({"gen", "--seq", "lattice", "--mesh", "0.5", "--R", "1",
                             "-o", path("lat.json")});
  EXPECT_TRUE(gen.contains("written"));
  const Json check = run_json({"validate", path("lat.json")});
  EXPECT_EQ(check.at("n").get<int>(), 5);

  const Json c4 = run_json({"gen", "--seq", "cycle", "--n", "4", "--scale", "1"});
  EXPECT_EQ(c4.at("n").get<int>(), 4);
  EXPECT_DOUBLE_EQ(c4.at("d")[0][2].get<double>(), 2.0);

  const Json s2 = run_json(
      {"gen", "--seq", "rescaled", "--space", path("seg1.json"), "--alpha", "2"});
  EXPECT_DOUBLE_EQ(s2.at("d")[0][1].get<double>(), 2.0);
}

TEST_F(CliTest, ConvergeScheduleSublimitAccum) {
  run_json({"gen", "--seq", "lattice", "--mesh", "0.125", "--R", "2", "-o",
            path("ref.json")});
  const Json rep = run_json({"converge", "--seq", "lattice", "--R", "2",
                             "--indices", "1..8", "--radii", "1,2", "--reference",
                             path("ref.json"), "--h-ref", "0.125", "--csv",
                             path("curve.csv")});
  EXPECT_EQ(rep.at("verdict").get<std::string>(), "converged");

  const Json sched = run_json({"schedule", "--table", path("curve.csv"), "--h", "id"});
  EXPECT_DOUBLE_EQ(sched.at("schedule").get<std::vector<double>>().back(), 2.0);
  const Json sub_sched = run_json({"schedule", "--table", path("curve.csv"), "--h",
                                   "id", "--subseq", "2,4,6,8"});
  EXPECT_EQ(sub_sched.at("schedule").size(), 4u);

  fs::create_directories(dir_ / "spaces");
  write_space("spaces/a0.json", {{0, 1}, {1, 0}}, 0);
  write_space("spaces/a1.json", {{0, 2}, {2, 0}}, 0);
  write_space("spaces/a2.json", {{0, 1}, {1, 0}}, 0);
  write_space("spaces/a3.json", {{0, 2}, {2, 0}}, 0);
  const Json sub = run_json({"sublimit", "--spaces", (dir_ / "spaces").string(),
                             "--subseq", "0,2", "--r", "3"});
  EXPECT_DOUBLE_EQ(sub.at("spread").get<double>(), 0.0);
  EXPECT_EQ(sub.at("medoid_index").get<int>(), 0);

  std::ofstream series(dir_ / "series.csv");
  for (int i = 0; i < 200; ++i)
    series << ((i % 2 == 0 ? 1.0 : -1.0) + 1.0 / (i + 1)) << "\n";
  series.close();
  const Json acc =
      run_json({"accum", "--csv", path("series.csv"), "--tol", "0.05"});
  ASSERT_EQ(acc.at("points").size(), 2u);
  EXPECT_NEAR(acc.at("points")[0].get<double>(), -1.0, 0.05);
  EXPECT_NEAR(acc.at("points")[1].get<double>(), 1.0, 0.05);
}

TEST_F(CliTest, DeterministicOutput) {
  std::string first, second;
  run({"gh", path("seg2.json"), path("seg1.json")}, &first);
  run({"gh", path("seg2.json"), path("seg1.json")}, &second);
  EXPECT_EQ(first, second);
  EXPECT_NE(first.find("\"value\": 0.5"), std::string::npos);
}

TEST_F(CliTest, BudgetFlagAndEnvironment) {
  std::string out;
  EXPECT_EQ(run({"approx", path("seg2.json"), path("seg1.json"), "--budget", "3"},
                &out),
            1);
  EXPECT_NE(out.find("BudgetExceeded"), std::string::npos);

  const std::string cmd = "GHKIT_BUDGET=3 " + std::string(GHKIT_CLI_BIN) +
                          " approx " + path("seg2.json") + " " +
                          path("seg1.json") + " > " + path("env_out.txt");
  EXPECT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 1);
  // A flag beats the environment.
  const std::string cmd2 = "GHKIT_BUDGET=3 " + std::string(GHKIT_CLI_BIN) +
                           " --budget 1e6 approx " + path("seg2.json") + " " +
                           path("seg1.json") + " > " + path("env_out2.txt");
  EXPECT_EQ(WEXITSTATUS(std::system(cmd2.c_str())), 0);
}

TEST_F(CliTest, BinarySmokeTest) {
  // End to end through the real executable.
  const std::string cmd = std::string(GHKIT_CLI_BIN) + " validate " +
                          path("seg2.json") + " > " + path("out.txt");
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  std::ifstream in(path("out.txt"));
  Json j;
  in >> j;
  EXPECT_TRUE(j.at("valid").get<bool>());

  const std::string bad_cmd = std::string(GHKIT_CLI_BIN) + " validate " +
                              path("bad.json") + " > " + path("out2.txt");
  const int status = std::system(bad_cmd.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 1);
}
