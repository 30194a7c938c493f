// msaverify command-line front end.
//
// Exit codes: 0 conforms / success, 1 violation or infeasible repair,
// 2 usage, configuration or input errors.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "msaverify/constraints.hpp"
#include "msaverify/error.hpp"
#include "msaverify/ingest.hpp"
#include "msaverify/report.hpp"
#include "msaverify/smt_export.hpp"
#include "msaverify/solver.hpp"

namespace {

using namespace msaverify;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
  std::string input;
  std::vector<std::string> concerns;
  std::optional<std::size_t> tau;
  bool hub_strict = false;
  std::optional<std::size_t> budget;
  std::vector<std::string> freeze;
  std::string format = "text";
  std::string solver;
  double timeout = 60.0;
  std::string output;
  std::string mode = "verify";
  bool run = false;
};

struct Loaded {
  SystemModel model;
  CanonicalModel canon;
  ConstraintModel cm;
};

AssembleOptions assemble_options(const RunConfig& config) {
  AssembleOptions options;
  options.concerns.clear();
  for (const auto& name : config.concerns) {
    std::string upper = name;
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    const auto concern = concern_from_string(upper);
    if (!concern) throw ConfigError("unknown concern '" + name + "' (expected architecture or authorization)");
    options.concerns.insert(*concern);
  }
  if (options.concerns.empty()) options.concerns.insert(Concern::Architecture);
  options.tau = config.tau;
  options.hub_strict = config.hub_strict;
  for (const auto& family : config.freeze) {
    if (family == "edges") {
      options.profile.edges_free = false;
    } else if (family == "roles") {
      options.profile.roles_free = false;
    } else {
      throw ConfigError("--freeze takes 'edges' or 'roles', not '" + family + "'");
    }
  }
  return options;
}

// Coherence checks run before the input is read so that configuration
// mistakes are reported even for missing files.
void check_config(const RunConfig& config, const AssembleOptions& options) {
  if (options.concerns.contains(Concern::Architecture) && !config.tau) {
    throw ConfigError("the architecture concern needs --tau");
  }
  if (config.format != "text" && config.format != "json") {
    throw ConfigError("--format takes 'text' or 'json'");
  }
}

Loaded load(const RunConfig& config) {
  const AssembleOptions options = assemble_options(config);
  check_config(config, options);
  Loaded out;
  out.model = load_model(config.input);
  out.canon = canonicalize(out.model);
  out.cm = assemble(out.canon, out.model, options);
  return out;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + path + "'");
  file << text;
  if (!file) throw ConfigError("cannot write '" + path + "'");
}

std::string solver_path(const RunConfig& config) {
  if (!config.solver.empty()) return config.solver;
  if (const char* env = std::getenv("MSAVERIFY_SOLVER"); env && *env) return env;
  return {};
}

int cmd_validate(const RunConfig& config) {
  try {
    const SystemModel model = load_model(config.input);
    std::cout << "valid: " << model.microservices.size() << " services, " << model.endpoints.size()
              << " endpoints, " << model.edges.size() << " calls"
              << (model.auth ? ", authorization data present" : "") << "\n";
    return kExitOk;
  } catch (const ParseError&) {
    throw;
  } catch (const ModelError& e) {
    std::cout << "invalid: " << e.what() << "\n";
    return kExitViolation;
  }
}

int cmd_verify(const RunConfig& config) {
  const Loaded in = load(config);
  const Verdict verdict = verify(in.canon, in.model, in.cm);
  if (config.format == "json") {
    std::cout << verdict_to_json(verdict);
  } else {
    std::cout << render_verdict_text(in.model, verdict);
  }
  return verdict.overall == Status::Sat ? kExitOk : kExitViolation;
}

int cmd_repair(const RunConfig& config) {
  const Loaded in = load(config);
  const RepairResult result = repair(in.canon, in.model, in.cm, config.budget);
  if (const auto* infeasible = std::get_if<InfeasibleWithinBudget>(&result)) {
    if (config.format == "json") {
      std::cout << "{\n  \"infeasible_within_budget\": " << infeasible->budget << "\n}\n";
    } else {
      std::cout << "infeasible within budget " << infeasible->budget << "\n";
    }
    return kExitViolation;
  }
  const auto& plan = std::get<RepairPlan>(result);
  const SystemModel repaired = apply_plan(in.model, plan);
  const CanonicalModel canon = canonicalize(repaired);
  const Verdict after = verify(canon, repaired, assemble(canon, repaired, assemble_options(config)));
  if (config.format == "json") {
    std::cout << plan_to_json(plan);
  } else {
    std::cout << render_plan_text(in.model, plan);
    std::cout << "re-verified: " << (after.overall == Status::Sat ? "SAT" : "UNSAT") << "\n";
  }
  return after.overall == Status::Sat ? kExitOk : kExitViolation;
}

int cmd_export(const RunConfig& config) {
  if (config.mode != "verify" && config.mode != "optimize") throw ConfigError("--mode takes 'verify' or 'optimize'");
  const Loaded in = load(config);
  const SmtMode mode = config.mode == "verify" ? SmtMode::Verify : SmtMode::Optimize;
  const SmtDocument document = export_smtlib(in.canon, in.model, in.cm, mode);
  if (!config.output.empty() || !config.run) write_output(config.output, document.text);
  if (!config.run) return kExitOk;

  const std::string solver = solver_path(config);
  if (solver.empty()) throw ConfigError("--run needs --solver or MSAVERIFY_SOLVER");
  const ExternalVerdict external = run_external(document, solver, config.timeout);
  std::cout << "solver status: " << to_string(external.status) << "\n";
  if (external.status != ExternalStatus::Sat && external.status != ExternalStatus::Unsat) {
    std::cout << "agreement: undetermined\n";
    return kExitOk;
  }
  bool agree = true;
  if (mode == SmtMode::Verify) {
    const Verdict verdict = verify(in.canon, in.model, in.cm);
    agree = (external.status == ExternalStatus::Sat) == (verdict.overall == Status::Sat);
    std::cout << "built-in verdict: " << (verdict.overall == Status::Sat ? "SAT" : "UNSAT") << "\n";
  } else {
    const RepairResult result = repair(in.canon, in.model, in.cm);
    if (external.objective) std::cout << "objective: " << *external.objective << "\n";
    for (const Change& change : external.changes) std::cout << "  " << render_change(change) << "\n";
    if (const auto* plan = std::get_if<RepairPlan>(&result)) {
      std::cout << "built-in repair cost: " << plan->cost << "\n";
      agree = external.status == ExternalStatus::Sat && external.objective &&
              *external.objective == static_cast<long long>(plan->cost);
    } else {
      std::cout << "built-in repair: infeasible\n";
      agree = external.status == ExternalStatus::Unsat;
    }
  }
  std::cout << "agreement: " << (agree ? "yes" : "NO") << "\n";
  return agree ? kExitOk : kExitViolation;
}

int cmd_generate(const GeneratorParams& params, const std::string& output) {
  const SystemModel model = generate_synthetic(params);
  const bool dsl = output.size() > 4 && output.ends_with(".msa");
  write_output(output, dsl ? render_dsl(model) : serialize_model(model));
  return kExitOk;
}

int cmd_stats(const RunConfig& config) {
  using Clock = std::chrono::steady_clock;
  auto ms = [](Clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };

  const AssembleOptions options = assemble_options(config);
  check_config(config, options);
  auto t0 = Clock::now();
  const SystemModel model = load_model(config.input);
  auto t1 = Clock::now();
  const CanonicalModel canon = canonicalize(model);
  auto t2 = Clock::now();
  const ConstraintModel cm = assemble(canon, model, options);
  auto t3 = Clock::now();
  const Verdict verdict = verify(canon, model, cm);
  auto t4 = Clock::now();

  std::size_t atoms = 0;
  for (const auto& c : cm.constraints) atoms += c.atoms.size();
  if (config.format == "json") {
    std::ostringstream out;
    out << "{\n  \"services\": " << canon.n() << ",\n  \"endpoints\": " << canon.m()
        << ",\n  \"edges\": " << canon.edges().size() << ",\n  \"constraints\": " << cm.constraints.size()
        << ",\n  \"atoms\": " << atoms << ",\n  \"violations\": " << verdict.violations.size()
        << ",\n  \"timings_ms\": {\"load\": " << ms(t1 - t0) << ", \"canonicalize\": " << ms(t2 - t1)
        << ", \"constraint_generation\": " << ms(t3 - t2) << ", \"verify\": " << ms(t4 - t3) << "}\n}\n";
    std::cout << out.str();
  } else {
    std::cout << "services: " << canon.n() << "\nendpoints: " << canon.m() << "\nedges: " << canon.edges().size()
              << "\nconstraints: " << cm.constraints.size() << " (" << atoms << " atoms)\nverdict: "
              << (verdict.overall == Status::Sat ? "SAT" : "UNSAT") << " (" << verdict.violations.size()
              << " violations)\n"
              << "load: " << ms(t1 - t0) << " ms\ncanonicalize: " << ms(t2 - t1)
              << " ms\nconstraint generation: " << ms(t3 - t2) << " ms\nverify: " << ms(t4 - t3) << " ms\n";
  }
  return verdict.overall == Status::Sat ? kExitOk : kExitViolation;
}

void add_constraint_options(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("input", config.input, "Model file (.msa DSL or JSON)")->required();
  cmd->add_option("--concern", config.concerns, "architecture | authorization (repeatable)")->take_all();
  cmd->add_option("--tau", config.tau, "Per-service degree-sum threshold");
  cmd->add_flag("--hub-strict", config.hub_strict, "Require degree sum < tau instead of <= tau");
  cmd->add_option("--freeze", config.freeze, "Hold a variable family constant: edges | roles (repeatable)");
  cmd->add_option("--format", config.format, "text | json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verify and repair microservice architectures against formal constraints"};
  app.require_subcommand(1);
  RunConfig config;
  GeneratorParams gen;
  std::string gen_output;

  auto* validate = app.add_subcommand("validate", "Check that a model file is well formed");
  validate->add_option("input", config.input, "Model file")->required();

  auto* verify_cmd = app.add_subcommand("verify", "Evaluate constraints on the system as it is");
  add_constraint_options(verify_cmd, config);

  auto* repair_cmd = app.add_subcommand("repair", "Compute a minimum-change repair plan");
  add_constraint_options(repair_cmd, config);
  repair_cmd->add_option("--budget", config.budget, "Maximum number of changes");

  auto* export_cmd = app.add_subcommand("export", "Write the constraints as SMT-LIB 2");
  add_constraint_options(export_cmd, config);
  export_cmd->add_option("--mode", config.mode, "verify | optimize");
  export_cmd->add_option("-o,--output", config.output, "Output file (default stdout)");
  export_cmd->add_flag("--run", config.run, "Run an external solver and compare with the built-in result");
  export_cmd->add_option("--solver", config.solver, "Solver executable (falls back to MSAVERIFY_SOLVER)");
  export_cmd->add_option("--timeout", config.timeout, "Solver timeout in seconds");

  auto* generate = app.add_subcommand("generate", "Write a synthetic system model");
  gen.n_services = 3;
  gen.min_endpoints = 5;
  gen.max_endpoints = 15;
  gen.edge_density = 0.006;
  generate->add_option("--services", gen.n_services, "Number of services");
  generate->add_option("--min-endpoints", gen.min_endpoints, "Minimum endpoints per service");
  generate->add_option("--max-endpoints", gen.max_endpoints, "Maximum endpoints per service");
  generate->add_option("--edge-density", gen.edge_density, "Probability of each candidate call, in [0, 1]");
  generate->add_flag("--acyclic", gen.acyclic, "Draw calls along a random topological order");
  generate->add_flag("--with-auth", gen.with_auth, "Attach roles, entities and accesses");
  generate->add_option("--roles", gen.n_roles, "Number of roles with --with-auth");
  generate->add_option("--entities", gen.n_entities, "Number of entities with --with-auth");
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_option("-o,--output", gen_output, "Output file; .msa writes DSL, anything else JSON");

  auto* stats = app.add_subcommand("stats", "Report model size and per-stage timings");
  add_constraint_options(stats, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(config);
    if (*verify_cmd) return cmd_verify(config);
    if (*repair_cmd) return cmd_repair(config);
    if (*export_cmd) return cmd_export(config);
    if (*generate) return cmd_generate(gen, gen_output);
    if (*stats) return cmd_stats(config);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
