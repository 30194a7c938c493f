#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msaverify/constraints.hpp"
#include "msaverify/model.hpp"
#include "msaverify/solver.hpp"

namespace msaverify {

enum class SmtMode : std::uint8_t { Verify, Optimize };

/// What an SMT symbol stands for in the model.
struct SmtVar {
  enum class Kind : std::uint8_t { Edge, Order, Permission };
  Kind kind = Kind::Edge;
  Edge edge;                // Kind::Edge
  EndpointId endpoint = 0;  // Kind::Order, Kind::Permission
  std::string role;         // Kind::Permission
  bool original = false;    // actual value in the system (Edge, Permission)
  friend bool operator==(const SmtVar&, const SmtVar&) = default;
};

struct SmtDocument {
  std::string text;
  SmtMode mode = SmtMode::Verify;
  std::map<std::string, SmtVar> var_manifest;
};

/// Symbol names: `edge_<from>_<to>`, `L_<endpoint>`, `perm_<endpoint>_<role index>`.
std::string edge_symbol(const Edge& edge);
std::string order_symbol(EndpointId e);
std::string perm_symbol(EndpointId e, std::size_t role_index);

/// VERIFY pins edges and permissions to the actual system and asks for
/// satisfiability; OPTIMIZE frees the mutable profile and minimizes the
/// number of changed variables.
SmtDocument export_smtlib(const CanonicalModel& canon, const SystemModel& model, const ConstraintModel& cm,
                          SmtMode mode);

enum class ExternalStatus : std::uint8_t { Sat, Unsat, Unknown, Timeout };

std::string_view to_string(ExternalStatus status);

struct ExternalVerdict {
  ExternalStatus status = ExternalStatus::Unknown;
  std::optional<long long> objective;
  std::vector<Change> changes;  // model assignment mapped back through the manifest
  std::string raw_output;
};

/// Parses solver stdout for `document`. Throws SolverError when the output
/// is not a recognizable check-sat response.
ExternalVerdict parse_solver_output(const SmtDocument& document, const std::string& output);

/// Runs `<solver_path> <file>` on a temporary copy of the document. A
/// non-positive timeout reports Timeout without launching. Throws
/// SolverError on launch failure or unparsable output.
ExternalVerdict run_external(const SmtDocument& document, const std::string& solver_path,
                             double timeout_seconds);

}  // namespace msaverify
