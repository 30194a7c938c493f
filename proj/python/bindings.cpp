#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "msaverify/constraints.hpp"
#include "msaverify/error.hpp"
#include "msaverify/ingest.hpp"
#include "msaverify/report.hpp"
#include "msaverify/smt_export.hpp"
#include "msaverify/solver.hpp"

namespace py = pybind11;
using namespace msaverify;

namespace {

AssembleOptions make_options(const std::vector<std::string>& concerns, std::optional<std::size_t> tau,
                             bool hub_strict, bool freeze_edges, bool freeze_roles) {
  AssembleOptions options;
  options.concerns.clear();
  for (const auto& name : concerns) {
    std::string upper = name;
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    const auto concern = concern_from_string(upper);
    if (!concern) throw ConfigError("unknown concern '" + name + "'");
    options.concerns.insert(*concern);
  }
  options.tau = tau;
  options.hub_strict = hub_strict;
  options.profile.edges_free = !freeze_edges;
  options.profile.roles_free = !freeze_roles;
  return options;
}

ConstraintModel constraints_for(const CanonicalModel& canon, const SystemModel& model,
                                const std::vector<std::string>& concerns, std::optional<std::size_t> tau,
                                bool hub_strict, bool freeze_edges, bool freeze_roles) {
  return assemble(canon, model, make_options(concerns, tau, hub_strict, freeze_edges, freeze_roles));
}

std::string result_json(const RepairResult& result) {
  if (const auto* plan = std::get_if<RepairPlan>(&result)) return plan_to_json(*plan);
  return "{\"infeasible_within_budget\": " + std::to_string(std::get<InfeasibleWithinBudget>(result).budget) + "}";
}

}  // namespace

PYBIND11_MODULE(_msaverify, m) {
  m.doc() = "Microservice architecture verification and repair";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  static py::exception<ParseError> parse_error(m, "ParseError", base.ptr());
  static py::exception<ConfigError> config_error(m, "ConfigError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      parse_error(e.what());
    } catch (const ConfigError& e) {
      config_error(e.what());
    } catch (const Error& e) {
      base(e.what());
    }
  });

  py::class_<SystemModel>(m, "SystemModel")
      .def_property_readonly("services",
                             [](const SystemModel& s) {
                               std::vector<std::string> names;
                               for (const auto& service : s.microservices) names.push_back(service.name);
                               return names;
                             })
      .def_property_readonly("endpoints",
                             [](const SystemModel& s) {
                               std::vector<std::tuple<std::string, std::string, std::size_t>> out;
                               for (const auto& e : s.endpoints) out.emplace_back(e.method, e.path, e.parent);
                               return out;
                             })
      .def_property_readonly("edges",
                             [](const SystemModel& s) {
                               std::vector<std::pair<std::size_t, std::size_t>> out;
                               for (const Edge& e : s.edges) out.emplace_back(e.from, e.to);
                               return out;
                             })
      .def_property_readonly("has_auth", [](const SystemModel& s) { return s.auth.has_value(); })
      .def("to_json", &serialize_model)
      .def("to_dsl", &render_dsl)
      .def("__eq__", [](const SystemModel& a, const SystemModel& b) { return a == b; })
      .def("__repr__", [](const SystemModel& s) {
        return "<SystemModel services=" + std::to_string(s.microservices.size()) +
               " endpoints=" + std::to_string(s.endpoints.size()) + " edges=" + std::to_string(s.edges.size()) + ">";
      });

  m.def("load_model", &load_model, py::arg("path"));
  m.def("parse_dsl", [](const std::string& text) { return parse_dsl(text); }, py::arg("text"));
  m.def("parse_model_json", [](const std::string& text) { return parse_model_file(text); }, py::arg("text"));
  m.def("e_parents", [](const SystemModel& model) {
    const auto canon = canonicalize(model);
    return std::vector<std::size_t>(canon.e_parents().begin(), canon.e_parents().end());
  });

  m.def(
      "generate",
      [](std::size_t services, std::size_t min_endpoints, std::size_t max_endpoints, double edge_density,
         bool acyclic, bool with_auth, std::size_t roles, std::size_t entities, std::uint64_t seed) {
        GeneratorParams p{services, min_endpoints, max_endpoints, edge_density, acyclic,
                          with_auth, roles,    entities,      seed};
        return generate_synthetic(p);
      },
      py::arg("services"), py::arg("min_endpoints") = 5, py::arg("max_endpoints") = 15,
      py::arg("edge_density") = 0.006, py::arg("acyclic") = false, py::arg("with_auth") = false,
      py::arg("roles") = 3, py::arg("entities") = 2, py::arg("seed") = 0);

  m.def(
      "verify_json",
      [](const SystemModel& model, const std::vector<std::string>& concerns, std::optional<std::size_t> tau,
         bool hub_strict) {
        const auto canon = canonicalize(model);
        return verdict_to_json(verify(canon, model, constraints_for(canon, model, concerns, tau, hub_strict, false, false)));
      },
      py::arg("model"), py::arg("concerns") = std::vector<std::string>{"architecture"}, py::arg("tau") = py::none(), py::arg("hub_strict") = false);

  m.def(
      "repair_json",
      [](const SystemModel& model, const std::vector<std::string>& concerns, std::optional<std::size_t> tau,
         bool hub_strict, std::optional<std::size_t> budget, bool freeze_edges, bool freeze_roles) {
        const auto canon = canonicalize(model);
        const auto cm = constraints_for(canon, model, concerns, tau, hub_strict, freeze_edges, freeze_roles);
        return result_json(repair(canon, model, cm, budget));
      },
      py::arg("model"), py::arg("concerns") = std::vector<std::string>{"architecture"}, py::arg("tau") = py::none(), py::arg("hub_strict") = false,
      py::arg("budget") = py::none(), py::arg("freeze_edges") = false, py::arg("freeze_roles") = false);

  m.def(
      "brute_force_repair_json",
      [](const SystemModel& model, const std::vector<std::string>& concerns, std::optional<std::size_t> tau,
         bool hub_strict, bool freeze_edges, bool freeze_roles) {
        const auto canon = canonicalize(model);
        const auto cm = constraints_for(canon, model, concerns, tau, hub_strict, freeze_edges, freeze_roles);
        return result_json(brute_force_repair(model, cm));
      },
      py::arg("model"), py::arg("concerns") = std::vector<std::string>{"architecture"}, py::arg("tau") = py::none(), py::arg("hub_strict") = false,
      py::arg("freeze_edges") = false, py::arg("freeze_roles") = false);

  m.def(
      "export_smtlib",
      [](const SystemModel& model, const std::vector<std::string>& concerns, std::optional<std::size_t> tau,
         bool hub_strict, const std::string& mode) {
        if (mode != "verify" && mode != "optimize") throw ConfigError("mode must be 'verify' or 'optimize'");
        const auto canon = canonicalize(model);
        const auto cm = constraints_for(canon, model, concerns, tau, hub_strict, false, false);
        return export_smtlib(canon, model, cm, mode == "verify" ? SmtMode::Verify : SmtMode::Optimize).text;
      },
      py::arg("model"), py::arg("concerns") = std::vector<std::string>{"architecture"}, py::arg("tau") = py::none(), py::arg("hub_strict") = false,
      py::arg("mode") = "verify");
}
