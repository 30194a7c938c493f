// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Exit status is
// non-zero when any criterion fails.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "msaverify/constraints.hpp"
#include "msaverify/ingest.hpp"
#include "msaverify/smt_export.hpp"
#include "msaverify/solver.hpp"
#include "oracles.hpp"
#include "run_cli.hpp"

using namespace msaverify;

namespace {

// Budgets pinned from the acceptance criteria.
constexpr std::size_t kTopoGraphs = 1000;
constexpr std::size_t kTopoMaxEndpoints = 50;
constexpr double kTopoSeconds = 30.0;
constexpr std::size_t kRepairInstances = 200;
constexpr double kRepairSeconds = 60.0;
constexpr std::size_t kMonotonePairs = 500;
constexpr double kFixtureSeconds = 1.0;
constexpr double kScaleVerifySeconds = 2.0;
constexpr double kScaleGenerateSeconds = 1.0;

enum class Outcome { Pass, Fail, Skip };

struct Result {
  Outcome outcome = Outcome::Pass;
  std::string detail;
};

Result fail(std::string why) { return {Outcome::Fail, std::move(why)}; }

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

const std::string kFixtureDir = MSAVERIFY_FIXTURE_DIR;

ConstraintModel architecture(const CanonicalModel& canon, const SystemModel& m, std::size_t tau) {
  AssembleOptions o;
  o.tau = tau;
  return assemble(canon, m, o);
}

// Shared random corpus for criteria 3, 4 and 9.
std::vector<SystemModel> random_corpus() {
  std::mt19937_64 rng(20240601);
  std::vector<SystemModel> corpus;
  for (std::size_t i = 0; i < kTopoGraphs; ++i) {
    corpus.push_back(oracle::random_model(rng, {6, kTopoMaxEndpoints, 0, false, 2}));
  }
  return corpus;
}

std::size_t tau_for(std::size_t i) { return 1 + i % 9; }

Result fixture_fidelity() {
  const auto start = Clock::now();
  for (const char* name : {"trainticket.msa", "trainticket.json"}) {
    const auto m = load_model(kFixtureDir + "/" + name);
    const auto canon = canonicalize(m);
    if (canon.n() != 3 || canon.m() != 36) return fail(std::string(name) + ": wrong service/endpoint count");
    const std::vector<std::size_t> sizes{21, 8, 7};
    for (std::size_t s = 0; s < 3; ++s) {
      if (m.microservices[s].endpoint_indices.size() != sizes[s]) return fail("wrong endpoints per service");
    }
    for (EndpointId e = 0; e < 36; ++e) {
      const ServiceId want = e <= 20 ? 0 : e <= 28 ? 1 : 2;
      if (canon.parent(e) != want) return fail("E_parents mismatch at " + std::to_string(e));
    }
    const std::vector<Edge> expected{{0, 21}, {1, 22}, {2, 23}, {3, 24}, {4, 29}, {5, 30}, {6, 31}, {7, 32}};
    if (std::vector<Edge>(canon.edges().begin(), canon.edges().end()) != expected) return fail("edge list mismatch");
    if (m.microservices[0].name != "ts-admin-basic-info-service" || m.microservices[1].name != "ts-contacts-service" ||
        m.microservices[2].name != "ts-price-service") {
      return fail("service names differ");
    }
  }
  const double t = seconds_since(start);
  if (t >= kFixtureSeconds) return fail("took " + std::to_string(t) + " s");
  return {Outcome::Pass, "3 services 21/8/7, 8 edges, both formats"};
}

Result fixture_verification() {
  const std::string fixture = kFixtureDir + "/trainticket.msa";
  const auto ok = testsupport::run_cli("verify " + fixture + " --concern architecture --tau 8 --format json");
  if (ok.exit_code != 0) return fail("tau 8 exit " + std::to_string(ok.exit_code));
  const auto bad = testsupport::run_cli("verify " + fixture + " --concern architecture --tau 7 --format json");
  if (bad.exit_code != 1) return fail("tau 7 exit " + std::to_string(bad.exit_code));
  const auto m = load_model(fixture);
  const auto canon = canonicalize(m);
  const auto v = verify(canon, m, architecture(canon, m, 7));
  if (v.violations.size() != 1) return fail("expected exactly one violation");
  const auto* hub = std::get_if<HubWitness>(&v.violations[0].witness);
  if (!hub || hub->service != 0 || hub->sum != 8 || hub->tau != 7) return fail("wrong HUB witness");
  if (bad.out.find("\"sum\": 8") == std::string::npos || bad.out.find("\"service\": 0") == std::string::npos) {
    return fail("CLI report lacks the HUB witness");
  }
  return {Outcome::Pass, "tau 8 -> exit 0; tau 7 -> exit 1, HUB service 0 sum 8"};
}

Result topo_property(const std::vector<SystemModel>& corpus) {
  const auto start = Clock::now();
  std::size_t cyclic = 0;
  for (const auto& m : corpus) {
    const auto canon = canonicalize(m);
    const auto r = topo_witness(canon);
    const bool oracle_cycle = oracle::has_cycle(m.endpoints.size(), m.edges);
    if (r.witness.has_value() == oracle_cycle) return fail("existence mismatch against DFS oracle");
    if (r.witness && !oracle::labels_respect_edges(r.witness->labels, m.edges)) return fail("labels violate an edge");
    if (!r.witness) {
      ++cyclic;
      const auto& c = r.cycle;
      if (c.size() < 2 || c.front() != c.back()) return fail("cycle witness not closed");
      for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        if (!m.edges.contains({c[i], c[i + 1]})) return fail("cycle witness uses a missing edge");
      }
    }
  }
  const double t = seconds_since(start);
  if (t >= kTopoSeconds) return fail("took " + std::to_string(t) + " s");
  return {Outcome::Pass, std::to_string(corpus.size()) + " graphs (" + std::to_string(cyclic) + " cyclic), 0 mismatches"};
}

Result nirc_hub_property(const std::vector<SystemModel>& corpus) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& m = corpus[i];
    const auto canon = canonicalize(m);
    const std::size_t tau = tau_for(i);
    const auto v = verify(canon, m, architecture(canon, m, tau));
    std::vector<Edge> nirc;
    std::vector<std::pair<ServiceId, std::size_t>> hubs;
    for (const auto& viol : v.violations) {
      if (const auto* w = std::get_if<NircWitness>(&viol.witness)) nirc.push_back(w->edge);
      if (const auto* w = std::get_if<HubWitness>(&viol.witness)) hubs.emplace_back(w->service, w->sum);
    }
    if (nirc != oracle::intraservice_edges(m)) return fail("NIRC mismatch on model " + std::to_string(i));
    std::vector<std::pair<ServiceId, std::size_t>> expected;
    const auto sums = oracle::degree_sums(m);
    for (ServiceId s = 0; s < sums.size(); ++s) {
      if (sums[s] > tau) expected.emplace_back(s, sums[s]);
    }
    if (hubs != expected) return fail("HUB mismatch on model " + std::to_string(i));
  }
  return {Outcome::Pass, std::to_string(corpus.size()) + " models, 0 mismatches"};
}

Result repair_minimality() {
  const auto start = Clock::now();
  std::mt19937_64 rng(77);
  std::size_t instances = 0;
  std::size_t with_auth = 0;
  std::size_t attempts = 0;
  while (instances < kRepairInstances) {
    if (++attempts > 100 * kRepairInstances) return fail("could not draw enough UNSAT instances");
    const bool auth = attempts % 3 == 0;
    // Auth instances: at most 6 endpoints x 2 roles = 12 role-edit candidates.
    const auto m = oracle::random_model(rng, {3, auth ? 6u : 10u, 12, auth, 2});
    const auto canon = canonicalize(m);
    AssembleOptions o;
    o.tau = 1 + attempts % 5;
    if (auth) o.concerns.insert(Concern::Authorization);
    if (auth && attempts % 2 == 0) o.profile.edges_free = false;
    const auto cm = assemble(canon, m, o);
    if (verify(canon, m, cm).overall == Status::Sat) continue;
    ++instances;
    with_auth += auth;

    const auto fast = repair(canon, m, cm);
    const auto slow = brute_force_repair(m, cm);
    if (fast != slow) return fail("repair and oracle disagree on instance " + std::to_string(instances));
    if (const auto* plan = std::get_if<RepairPlan>(&fast)) {
      if (plan->cost != plan->changes.size()) return fail("cost does not match change count");
      const auto fixed = apply_plan(m, *plan);
      const auto fc = canonicalize(fixed);
      if (verify(fc, fixed, assemble(fc, fixed, o)).overall != Status::Sat) return fail("applied plan not SAT");
    }
  }
  const double t = seconds_since(start);
  if (t >= kRepairSeconds) return fail("took " + std::to_string(t) + " s");
  return {Outcome::Pass, std::to_string(instances) + " UNSAT instances (" + std::to_string(with_auth) +
                             " with authorization), 0 mismatches"};
}

Result anti_monotonicity() {
  std::mt19937_64 rng(5);
  std::size_t pairs = 0;
  while (pairs < kMonotonePairs) {
    const auto m = oracle::random_model(rng, {5, 30, 0, false, 2});
    if (m.edges.empty()) continue;
    const std::size_t tau = 1 + pairs % 6;
    const auto canon = canonicalize(m);
    const auto before = count_violated_atoms(canon, architecture(canon, m, tau)).total();
    auto it = m.edges.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(std::uniform_int_distribution<std::size_t>(0, m.edges.size() - 1)(rng)));
    SystemModel smaller = m;
    smaller.edges.erase(*it);
    const auto sc = canonicalize(smaller);
    const auto after = count_violated_atoms(sc, architecture(sc, smaller, tau)).total();
    if (after > before) return fail("removing an edge increased violated atoms");
    ++pairs;
  }
  return {Outcome::Pass, std::to_string(pairs) + " (model, removed edge) pairs"};
}

Result round_trip_determinism() {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto m = oracle::random_model(rng, {4, 20, 0, i % 2 == 0, 3});
    const std::string a = serialize_model(m);
    if (a != serialize_model(m)) return fail("serialize not deterministic");
    if (parse_model_file(a) != m) return fail("model file round-trip lost data");
    GeneratorParams p{4, 1, 6, 0.15, i % 3 == 0, i % 2 == 0, 3, 2, static_cast<std::uint64_t>(i)};
    const auto g = generate_synthetic(p);
    if (parse_dsl(render_dsl(g)) != g) return fail("DSL round-trip lost data");
    const auto canon = canonicalize(g);
    AssembleOptions o;
    o.tau = 4;
    if (g.auth) o.concerns.insert(Concern::Authorization);
    const auto cm = assemble(canon, g, o);
    for (SmtMode mode : {SmtMode::Verify, SmtMode::Optimize}) {
      if (export_smtlib(canon, g, cm, mode).text != export_smtlib(canon, g, cm, mode).text) {
        return fail("SMT export not deterministic");
      }
    }
  }
  for (const char* name : {"trainticket.msa", "auth_demo.msa"}) {
    const auto m = load_model(kFixtureDir + "/" + name);
    if (parse_dsl(render_dsl(m)) != m || parse_model_file(serialize_model(m)) != m) return fail("fixture round-trip");
  }
  return {Outcome::Pass, "200 JSON + 200 DSL round-trips, serialize and export byte-stable"};
}

Result scalability() {
  GeneratorParams p;
  p.n_services = 100;
  p.min_endpoints = 5;
  p.max_endpoints = 15;
  p.edge_density = 0.006;
  p.acyclic = true;
  p.seed = 2024;
  const auto m = generate_synthetic(p);
  const auto canon = canonicalize(m);
  const auto g0 = Clock::now();
  const auto cm = architecture(canon, m, 1000000);
  const double gen_s = seconds_since(g0);
  const auto v0 = Clock::now();
  const auto v = verify(canon, m, cm);
  const double verify_s = seconds_since(v0);

  std::ostringstream detail;
  detail << canon.n() << " services / " << canon.m() << " endpoints / " << canon.edges().size()
         << " edges; constraint generation " << gen_s * 1000 << " ms, verify " << verify_s * 1000 << " ms";
  if (canon.m() < 800 || canon.m() > 1200 || canon.edges().size() < 2400 || canon.edges().size() > 3600) {
    return fail("generated size off target: " + detail.str());
  }
  if (v.overall != Status::Sat) return fail("acyclic system did not verify SAT");
  if (gen_s >= kScaleGenerateSeconds || verify_s >= kScaleVerifySeconds) return fail(detail.str());

  // The stats report records the same timings.
  const std::string path = "acceptance_scale.json";
  if (testsupport::run_cli("generate --services 100 --acyclic --seed 2024 -o " + path).exit_code != 0) {
    return fail("CLI generate failed");
  }
  const auto stats = testsupport::run_cli("stats " + path + " --tau 1000000");
  std::remove(path.c_str());
  if (stats.exit_code != 0 || stats.out.find("constraint generation:") == std::string::npos) {
    return fail("stats report missing timings");
  }
  return {Outcome::Pass, detail.str()};
}

std::string configured_solver() {
  if (const char* env = std::getenv("MSAVERIFY_SOLVER"); env && *env) return env;
  return MSAVERIFY_TEST_SOLVER;
}

Result solver_agreement(const std::vector<SystemModel>& corpus) {
  const std::string solver = configured_solver();
  if (solver.empty()) return {Outcome::Skip, "no SMT solver configured"};
  std::size_t verify_docs = 0;
  auto check_verify = [&](const SystemModel& m, const ConstraintModel& cm, const CanonicalModel& canon) {
    const auto builtin = verify(canon, m, cm);
    const auto ext = run_external(export_smtlib(canon, m, cm, SmtMode::Verify), solver, 60);
    ++verify_docs;
    return ext.status == (builtin.overall == Status::Sat ? ExternalStatus::Sat : ExternalStatus::Unsat);
  };
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto canon = canonicalize(corpus[i]);
    if (!check_verify(corpus[i], architecture(canon, corpus[i], tau_for(i)), canon)) {
      return fail("VERIFY status disagrees on corpus model " + std::to_string(i));
    }
  }
  for (const char* name : {"trainticket.msa", "auth_demo.msa"}) {
    const auto m = load_model(kFixtureDir + "/" + name);
    const auto canon = canonicalize(m);
    AssembleOptions o;
    o.tau = 8;
    if (m.auth) o.concerns.insert(Concern::Authorization);
    if (!check_verify(m, assemble(canon, m, o), canon)) return fail(std::string("VERIFY disagrees on ") + name);
  }

  std::mt19937_64 rng(99);
  std::size_t optimize_docs = 0;
  for (std::size_t attempt = 0; optimize_docs < 60; ++attempt) {
    const bool auth = attempt % 3 == 0;
    const auto m = oracle::random_model(rng, {3, auth ? 6u : 10u, 12, auth, 2});
    const auto canon = canonicalize(m);
    AssembleOptions o;
    o.tau = 1 + attempt % 5;
    if (auth) o.concerns.insert(Concern::Authorization);
    const auto cm = assemble(canon, m, o);
    const auto oracle_result = brute_force_repair(m, cm);
    const auto ext = run_external(export_smtlib(canon, m, cm, SmtMode::Optimize), solver, 60);
    ++optimize_docs;
    if (const auto* plan = std::get_if<RepairPlan>(&oracle_result)) {
      if (ext.status != ExternalStatus::Sat || ext.objective != static_cast<long long>(plan->cost)) {
        return fail("OPTIMIZE objective disagrees with oracle cost " + std::to_string(plan->cost));
      }
    } else if (ext.status != ExternalStatus::Unsat) {
      return fail("OPTIMIZE should be unsat for an infeasible instance");
    }
  }
  return {Outcome::Pass, std::to_string(verify_docs) + " VERIFY documents, " + std::to_string(optimize_docs) +
                             " OPTIMIZE objectives agree (" + solver + ")"};
}

}  // namespace

int main() {
  const auto corpus = random_corpus();
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"1 fixture fidelity", fixture_fidelity},
      {"2 fixture verification", fixture_verification},
      {"3 topological witness vs DFS oracle", [&] { return topo_property(corpus); }},
      {"4 NIRC and HUB verdicts vs recount", [&] { return nirc_hub_property(corpus); }},
      {"5 repair minimality vs exhaustive oracle", repair_minimality},
      {"6 edge removal never adds violated atoms", anti_monotonicity},
      {"7 round-trip and determinism", round_trip_determinism},
      {"8 scalability smoke", scalability},
      {"9 external solver agreement", [&] { return solver_agreement(corpus); }},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = Clock::now();
    Result r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = fail(std::string("exception: ") + e.what());
    }
    const char* tag = r.outcome == Outcome::Pass ? "PASS" : r.outcome == Outcome::Skip ? "SKIP" : "FAIL";
    failures += r.outcome == Outcome::Fail;
    std::cout << "[" << tag << "] " << name << " (" << seconds_since(start) << " s): " << r.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria met" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
