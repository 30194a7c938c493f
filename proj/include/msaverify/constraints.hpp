#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "msaverify/model.hpp"

namespace msaverify {

enum class Concern : std::uint8_t { Architecture, Authorization };

enum class ConstraintKind : std::uint8_t {
  Nirc,                   // no intraservice remote calls
  Hub,                    // bounded per-service degree sum
  Cycle,                  // topological labeling exists
  AuthEntityConsistency,  // equal role sets per (entity, operation)
  AuthChain,              // callee permits every caller role
};

std::string_view to_string(Concern concern);
std::string_view to_string(ConstraintKind kind);
std::optional<Concern> concern_from_string(std::string_view text);
std::optional<ConstraintKind> kind_from_string(std::string_view text);
Concern concern_of(ConstraintKind kind);

// Ground variables a constraint ranges over.
struct EdgeAtom {
  Edge edge;
  friend auto operator<=>(const EdgeAtom&, const EdgeAtom&) = default;
};
struct OrderAtom {  // L[endpoint]
  EndpointId endpoint = 0;
  friend auto operator<=>(const OrderAtom&, const OrderAtom&) = default;
};
struct RoleAtom {  // role (by index into the sorted role set) permitted on endpoint
  EndpointId endpoint = 0;
  std::size_t role = 0;
  friend auto operator<=>(const RoleAtom&, const RoleAtom&) = default;
};
using Atom = std::variant<EdgeAtom, OrderAtom, RoleAtom>;

struct HubParams {
  ServiceId service = 0;
  std::size_t tau = 0;
  bool strict = false;  // sum < tau instead of sum <= tau
  friend bool operator==(const HubParams&, const HubParams&) = default;
};

struct ConsistencyParams {
  std::string entity;
  Operation operation = Operation::Read;
  std::vector<EndpointId> endpoints;  // accessing endpoints, ascending
  friend bool operator==(const ConsistencyParams&, const ConsistencyParams&) = default;
};

using ConstraintParams = std::variant<std::monostate, HubParams, ConsistencyParams>;

struct Constraint {
  std::string id;
  Concern concern = Concern::Architecture;
  ConstraintKind kind = ConstraintKind::Nirc;
  ConstraintParams params;
  std::vector<Atom> atoms;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

/// Which variable families the optimizer may change. Everything else in the
/// model is held constant. The default frees edges (removal only) and
/// permitted-role sets.
struct VariableProfile {
  bool edges_free = true;
  bool roles_free = true;
  friend bool operator==(const VariableProfile&, const VariableProfile&) = default;
};

struct ConstraintModel {
  std::vector<Constraint> constraints;
  VariableProfile mutable_vars;

  bool has_kind(ConstraintKind kind) const;
  bool has_concern(Concern concern) const;
  friend bool operator==(const ConstraintModel&, const ConstraintModel&) = default;
};

std::vector<Constraint> gen_nirc(const CanonicalModel& canon);
std::vector<Constraint> gen_hub(const CanonicalModel& canon, std::size_t tau, bool strict = false);
std::vector<Constraint> gen_cycle(const CanonicalModel& canon);
/// Throws ConfigError when the model has no auth extension.
std::vector<Constraint> gen_auth(const SystemModel& model);

struct AssembleOptions {
  std::set<Concern> concerns{Concern::Architecture};
  std::optional<std::size_t> tau;
  bool hub_strict = false;
  VariableProfile profile;
};

/// Throws ConfigError when architecture is requested without tau or
/// authorization without an auth extension.
ConstraintModel assemble(const CanonicalModel& canon, const SystemModel& model,
                         const AssembleOptions& options);

}  // namespace msaverify
