#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "msaverify/report.hpp"
#include "run_cli.hpp"

using testsupport::run_cli;

namespace {

const std::string kFixture = std::string(MSAVERIFY_FIXTURE_DIR) + "/trainticket.msa";
const std::string kAuth = std::string(MSAVERIFY_FIXTURE_DIR) + "/auth_demo.msa";

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = testing::TempDir() + name;
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

}  // namespace

TEST(Cli, ValidateFixture) {
  const auto r = run_cli("validate " + kFixture);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("36 endpoints"), std::string::npos);
}

TEST(Cli, VerifyExitCodes) {
  EXPECT_EQ(run_cli("verify " + kFixture + " --concern architecture --tau 8").exit_code, 0);
  const auto r = run_cli("verify " + kFixture + " --concern architecture --tau 7");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.out.find("degree sum 8"), std::string::npos);
  EXPECT_EQ(run_cli("verify " + kFixture + " --concern architecture").exit_code, 2);
  EXPECT_EQ(run_cli("verify /nonexistent.msa --tau 8").exit_code, 2);
  EXPECT_EQ(run_cli("verify " + kFixture + " --tau 8 --concern security").exit_code, 2);
  EXPECT_EQ(run_cli("frobnicate").exit_code, 2);
}

TEST(Cli, VerifyJsonRoundTrips) {
  const auto r = run_cli("verify " + kFixture + " --tau 7 --format json");
  const auto v = msaverify::verdict_from_json(r.out);
  ASSERT_EQ(v.violations.size(), 1u);
  EXPECT_EQ(std::get<msaverify::HubWitness>(v.violations[0].witness).sum, 8u);
  EXPECT_EQ(msaverify::verdict_to_json(v), r.out);
}

TEST(Cli, RepairMutualEdge) {
  const auto path = write_temp("mutual.msa",
                               "service a { endpoint GET /a }\nservice b { endpoint GET /b }\n"
                               "call GET /a -> GET /b\ncall GET /b -> GET /a\n");
  const auto r = run_cli("repair " + path + " --tau 5");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("remove call E_0→E_1"), std::string::npos);
  EXPECT_NE(r.out.find("cost 1"), std::string::npos);
  EXPECT_NE(r.out.find("re-verified: SAT"), std::string::npos);
  const auto none = run_cli("repair " + path + " --tau 5 --budget 0");
  EXPECT_EQ(none.exit_code, 1);
  EXPECT_NE(none.out.find("infeasible within budget 0"), std::string::npos);
  const auto json = run_cli("repair " + path + " --tau 5 --format json");
  EXPECT_EQ(msaverify::plan_from_json(json.out).cost, 1u);
}

TEST(Cli, RepairSatModelIsEmptyPlan) {
  const auto r = run_cli("repair " + kFixture + " --tau 8");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("cost 0"), std::string::npos);
}

TEST(Cli, RepairAuthorizationWithFreeze) {
  const auto r = run_cli("repair " + kAuth + " --concern authorization --freeze edges");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("add role 'user' to E_1"), std::string::npos);
  EXPECT_EQ(run_cli("repair " + kAuth + " --concern authorization --freeze nothing").exit_code, 2);
}

TEST(Cli, ExportWritesFile) {
  const std::string out = testing::TempDir() + "fixture.smt2";
  EXPECT_EQ(run_cli("export " + kFixture + " --mode verify --tau 8 -o " + out).exit_code, 0);
  const std::string text = slurp(out);
  EXPECT_NE(text.find("(check-sat)"), std::string::npos);
  const std::string bad = write_temp("bad.msa", "service {\n");
  EXPECT_EQ(run_cli("export " + bad + " --tau 8").exit_code, 2);
  EXPECT_EQ(run_cli("export " + kFixture + " --tau 8 --mode maybe").exit_code, 2);
}

TEST(Cli, GenerateIsDeterministicAndChecksRanges) {
  const std::string a = testing::TempDir() + "gen_a.json";
  const std::string b = testing::TempDir() + "gen_b.json";
  EXPECT_EQ(run_cli("generate --services 3 --seed 7 -o " + a).exit_code, 0);
  EXPECT_EQ(run_cli("generate --services 3 --seed 7 -o " + b).exit_code, 0);
  EXPECT_FALSE(slurp(a).empty());
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(run_cli("generate --edge-density 1.5").exit_code, 2);
}

TEST(Cli, GeneratedAcyclicSystemPassesCycleCheck) {
  const std::string path = testing::TempDir() + "gen_big.msa";
  ASSERT_EQ(run_cli("generate --services 100 --acyclic --seed 1 -o " + path).exit_code, 0);
  const auto r = run_cli("verify " + path + " --tau 1000000");
  EXPECT_EQ(r.exit_code, 0) << r.out;
}

TEST(Cli, StatsReportsTimings) {
  const auto r = run_cli("stats " + kFixture + " --tau 8 --format json");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("\"constraint_generation\""), std::string::npos);
  EXPECT_NE(r.out.find("\"edges\": 8"), std::string::npos);
}
