#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run(const std::string& args) {
  const std::string cmd = std::string(QMONO_CLI) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("qmono_cli_test_" + name);
}

}  // namespace

TEST(Cli, VerifyAlgebraPasses) {
  const CliResult r = run("verify algebra --samples 2000");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

TEST(Cli, FlippedTableExitsOneAndNamesWorstOffender) {
  const CliResult r = run("verify algebra --samples 200 --inject flip-mul");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("worst offender"), std::string::npos) << r.out;
}

TEST(Cli, GeometryReportCarriesCocycle) {
  const CliResult r = run("verify geometry --samples 10000 --seed 7 --json");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["seed"], 7);
  bool found = false;
  for (const auto& c : j["checks"])
    if (c["name"] == "transport cocycle") {
      found = true;
      EXPECT_LE(c["max_dev"].get<double>(), 1e-12);
    }
  EXPECT_TRUE(found);
}

TEST(Cli, GisReportsTetraflux) {
  const CliResult r = run("verify gis --samples 50 --n 16 --json");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("tetraflux quantization"), std::string::npos);
}

TEST(Cli, SameSeedGivesIdenticalJson) {
  const auto a = scratch("a.json"), b = scratch("b.json");
  ASSERT_EQ(run("verify geometry --samples 500 --seed 11 --out " + a.string()).code, 0);
  ASSERT_EQ(run("verify geometry --samples 500 --seed 11 --out " + b.string()).code, 0);
  const std::string ja = slurp(a);
  EXPECT_FALSE(ja.empty());
  EXPECT_EQ(ja, slurp(b));
  EXPECT_EQ(nlohmann::json::parse(ja).count("timestamp"), 0u);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(Cli, TimestampIsOptIn) {
  const CliResult r = run("verify algebra --samples 10 --json --timestamp");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(r.out).contains("timestamp"));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("verify topology").code, 2);
  EXPECT_EQ(run("verify algebra --samples -3").code, 2);
  EXPECT_EQ(run("verify algebra --n 7").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("chern --n 4").code, 2);
  EXPECT_EQ(run("evolve --preset orbit").code, 2);
  EXPECT_EQ(run("evolve --center 0.5 0 0 --steps 1").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, ChernTable) {
  const auto csv = scratch("chern.csv");
  const CliResult r = run("chern --out " + csv.string());
  EXPECT_EQ(r.code, 0) << r.out;
  const std::string table = slurp(csv);
  EXPECT_EQ(table.rfind("n_theta,n_phi,value,error,ratio\n", 0), 0u);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 6);  // 16..256
  std::filesystem::remove(csv);
  EXPECT_EQ(run("chern --radius 7").code, 0);
}

TEST(Cli, EvolveZeroSteps) {
  const auto csv = scratch("traj.csv");
  const auto rep = scratch("ehrenfest.json");
  const CliResult r = run("evolve --preset static --n 16 --steps 0 --out " + csv.string() + " --report " + rep.string());
  EXPECT_EQ(r.code, 0) << r.out;
  const std::string traj = slurp(csv);
  EXPECT_EQ(traj.rfind("t,x1,x2,x3,v1,v2,v3,norm,energy\n", 0), 0u);
  EXPECT_EQ(std::count(traj.begin(), traj.end(), '\n'), 2);
  EXPECT_EQ(nlohmann::json::parse(slurp(rep))["suite"], "evolve/static");
  std::filesystem::remove(csv);
  std::filesystem::remove(rep);
}

TEST(Cli, EvolveNormColumnConstant) {
  const auto csv = scratch("traj2.csv");
  const CliResult r = run("evolve --preset static --n 16 --steps 30 --out " + csv.string());
  EXPECT_EQ(r.code, 0) << r.out;
  std::istringstream in(slurp(csv));
  std::string line;
  std::getline(in, line);
  double first = -1.0;
  int rows = 0;
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::string cell;
    for (int c = 0; c < 8; ++c) std::getline(ls, cell, ',');
    const double v = std::stod(cell);
    if (first < 0) first = v;
    EXPECT_NEAR(v, first, 1e-10);
    ++rows;
  }
  EXPECT_EQ(rows, 31);
  std::filesystem::remove(csv);
}
