#include <gtest/gtest.h>

#include <cstdlib>

#include "msaverify/constraints.hpp"
#include "msaverify/error.hpp"
#include "msaverify/ingest.hpp"
#include "msaverify/smt_export.hpp"

using namespace msaverify;

namespace {

SystemModel mutual() {
  return parse_dsl("service a { endpoint GET /a }\nservice b { endpoint GET /b }\n"
                   "call GET /a -> GET /b\ncall GET /b -> GET /a\n");
}

SmtDocument doc(const SystemModel& m, SmtMode mode, std::set<Concern> concerns = {Concern::Architecture}) {
  const auto canon = canonicalize(m);
  AssembleOptions o;
  o.tau = 10;
  o.concerns = std::move(concerns);
  return export_smtlib(canon, m, assemble(canon, m, o), mode);
}

std::string configured_solver() {
  if (const char* env = std::getenv("MSAVERIFY_SOLVER"); env && *env) return env;
  return MSAVERIFY_TEST_SOLVER;
}

}  // namespace

TEST(SmtExport, SymbolScheme) {
  EXPECT_EQ(edge_symbol({3, 14}), "edge_3_14");
  EXPECT_EQ(order_symbol(7), "L_7");
  EXPECT_EQ(perm_symbol(2, 1), "perm_2_1");
}

TEST(SmtExport, VerifyDocumentPinsEdgesAndStaysStandard) {
  const auto d = doc(mutual(), SmtMode::Verify);
  EXPECT_NE(d.text.find("(set-logic QF_LIA)"), std::string::npos);
  EXPECT_NE(d.text.find("(assert edge_0_1)"), std::string::npos);
  EXPECT_NE(d.text.find("(assert (=> edge_0_1 (< L_0 L_1)))"), std::string::npos);
  EXPECT_EQ(d.text.find("minimize"), std::string::npos);
  EXPECT_EQ(d.text.find("get-objectives"), std::string::npos);
  EXPECT_EQ(d.var_manifest.size(), 4u);  // two edges, two labels
}

TEST(SmtExport, EveryDeclaredSymbolIsInManifest) {
  const auto m = load_model(std::string(MSAVERIFY_FIXTURE_DIR) + "/auth_demo.msa");
  const auto d = doc(m, SmtMode::Optimize, {Concern::Architecture, Concern::Authorization});
  std::size_t declared = 0;
  for (std::size_t pos = d.text.find("(declare-const "); pos != std::string::npos;
       pos = d.text.find("(declare-const ", pos + 1)) {
    const std::size_t start = pos + 15;
    const std::string symbol = d.text.substr(start, d.text.find(' ', start) - start);
    EXPECT_TRUE(d.var_manifest.contains(symbol)) << symbol;
    ++declared;
  }
  EXPECT_EQ(declared, d.var_manifest.size());
}

TEST(SmtExport, OptimizeAddsGuardsAndObjective) {
  const auto d = doc(mutual(), SmtMode::Optimize);
  EXPECT_NE(d.text.find("(assert (=> edge_0_1 true))"), std::string::npos);
  EXPECT_NE(d.text.find("(minimize (+ (ite edge_0_1 0 1) (ite edge_1_0 0 1)))"), std::string::npos);
  EXPECT_NE(d.text.find("(get-objectives)"), std::string::npos);
}

TEST(SmtExport, ByteDeterministic) {
  EXPECT_EQ(doc(mutual(), SmtMode::Optimize).text, doc(mutual(), SmtMode::Optimize).text);
}

TEST(SolverOutput, ParsesStatusObjectiveAndModel) {
  const auto d = doc(mutual(), SmtMode::Optimize);
  const auto v = parse_solver_output(d,
                                     "sat\n(objectives\n (( + (ite edge_0_1 0 1) (ite edge_1_0 0 1)) 1)\n)\n"
                                     "(\n  (define-fun edge_0_1 () Bool\n    false)\n"
                                     "  (define-fun edge_1_0 () Bool\n    true)\n"
                                     "  (define-fun L_0 () Int\n    (- 1))\n)\n");
  EXPECT_EQ(v.status, ExternalStatus::Sat);
  EXPECT_EQ(v.objective, 1);
  ASSERT_EQ(v.changes.size(), 1u);
  EXPECT_EQ(std::get<RemoveEdge>(v.changes[0]).edge, (Edge{0, 1}));
}

TEST(SolverOutput, UnsatAndErrors) {
  const auto d = doc(mutual(), SmtMode::Verify);
  EXPECT_EQ(parse_solver_output(d, "unsat\n").status, ExternalStatus::Unsat);
  EXPECT_EQ(parse_solver_output(d, "unknown\n").status, ExternalStatus::Unknown);
  EXPECT_THROW(parse_solver_output(d, "(error \"line 1: bad\")\n"), SolverError);
  EXPECT_THROW(parse_solver_output(d, ""), SolverError);
  EXPECT_THROW(parse_solver_output(d, "sat (("), SolverError);
}

TEST(RunExternal, ZeroTimeoutReportsTimeout) {
  EXPECT_EQ(run_external(doc(mutual(), SmtMode::Verify), "/nonexistent/solver", 0).status,
            ExternalStatus::Timeout);
}

TEST(RunExternal, LaunchFailureThrows) {
  EXPECT_THROW(run_external(doc(mutual(), SmtMode::Verify), "/nonexistent/solver", 5), SolverError);
}

TEST(RunExternal, SlowSolverTimesOut) {
  // `sleep <file>` fails fast; a shell script that sleeps stands in for a slow solver.
  const std::string script = testing::TempDir() + "slow_solver.sh";
  {
    FILE* f = std::fopen(script.c_str(), "w");
    ASSERT_NE(f, nullptr);
    std::fputs("#!/bin/sh\nsleep 5\necho sat\n", f);
    std::fclose(f);
  }
  ASSERT_EQ(std::system(("chmod +x " + script).c_str()), 0);
  const auto v = run_external(doc(mutual(), SmtMode::Verify), script, 0.3);
  EXPECT_EQ(v.status, ExternalStatus::Timeout);
}

TEST(RunExternal, AgreesWithBuiltinWhenSolverConfigured) {
  const std::string solver = configured_solver();
  if (solver.empty()) GTEST_SKIP() << "no SMT solver configured";
  EXPECT_EQ(run_external(doc(mutual(), SmtMode::Verify), solver, 30).status, ExternalStatus::Unsat);
  const auto opt = run_external(doc(mutual(), SmtMode::Optimize), solver, 30);
  EXPECT_EQ(opt.status, ExternalStatus::Sat);
  EXPECT_EQ(opt.objective, 1);
  const auto tt = load_model(std::string(MSAVERIFY_FIXTURE_DIR) + "/trainticket.msa");
  const auto canon = canonicalize(tt);
  AssembleOptions o;
  o.tau = 8;
  EXPECT_EQ(run_external(export_smtlib(canon, tt, assemble(canon, tt, o), SmtMode::Verify), solver, 30).status,
            ExternalStatus::Sat);
}
