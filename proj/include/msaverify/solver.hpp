#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "msaverify/constraints.hpp"
#include "msaverify/model.hpp"

namespace msaverify {

struct NircWitness {
  Edge edge;
  ServiceId parent = 0;
  friend bool operator==(const NircWitness&, const NircWitness&) = default;
};

struct HubWitness {
  ServiceId service = 0;
  std::size_t sum = 0;
  std::size_t tau = 0;
  bool strict = false;
  friend bool operator==(const HubWitness&, const HubWitness&) = default;
};

/// Closed endpoint path: front() == back(), consecutive pairs are edges.
struct CycleWitness {
  std::vector<EndpointId> path;
  friend bool operator==(const CycleWitness&, const CycleWitness&) = default;
};

struct ChainWitness {
  Edge edge;
  std::string role;  // permitted on the caller but not on the callee
  friend bool operator==(const ChainWitness&, const ChainWitness&) = default;
};

struct ConsistencyWitness {
  std::string entity;
  Operation operation = Operation::Read;
  std::string role;
  EndpointId holder = 0;   // permits `role`
  EndpointId lacking = 0;  // does not
  friend bool operator==(const ConsistencyWitness&, const ConsistencyWitness&) = default;
};

using Witness = std::variant<NircWitness, HubWitness, CycleWitness, ChainWitness, ConsistencyWitness>;

struct Violation {
  std::string constraint_id;
  ConstraintKind kind = ConstraintKind::Nirc;
  Concern concern = Concern::Architecture;
  Witness witness;
  friend bool operator==(const Violation&, const Violation&) = default;
};

enum class Status : std::uint8_t { Sat, Unsat };

struct Verdict {
  Status overall = Status::Sat;
  std::vector<Violation> violations;
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Re-checks one witness directly against the model.
bool witness_holds(const SystemModel& model, const Violation& violation);

/// Evaluates every constraint with all variables pinned to the model's
/// actual state. Throws ModelError if `cm` references elements the model
/// does not have.
Verdict verify(const CanonicalModel& canon, const SystemModel& model, const ConstraintModel& cm);

struct TopoWitness {
  std::vector<long long> labels;  // L[e]; labels[from] < labels[to] for every edge
};

struct TopoResult {
  std::optional<TopoWitness> witness;
  std::vector<EndpointId> cycle;  // closed path when witness is absent
};

TopoResult topo_witness(const CanonicalModel& canon);

/// Deterministic DFS in index order; returns the first closed cycle found,
/// or an empty vector for an acyclic graph.
std::vector<EndpointId> find_cycle(const CanonicalModel& canon);

/// Per-kind count of violated architecture atoms: intraservice edges,
/// over-threshold services, and edges lying on some cycle.
struct AtomViolationCounts {
  std::size_t nirc = 0;
  std::size_t hub = 0;
  std::size_t cycle = 0;
  std::size_t total() const { return nirc + hub + cycle; }
};
AtomViolationCounts count_violated_atoms(const CanonicalModel& canon, const ConstraintModel& cm);

struct RemoveEdge {
  Edge edge;
  friend bool operator==(const RemoveEdge&, const RemoveEdge&) = default;
};
struct AddRole {
  EndpointId endpoint = 0;
  std::string role;
  friend bool operator==(const AddRole&, const AddRole&) = default;
};
struct RemoveRole {
  EndpointId endpoint = 0;
  std::string role;
  friend bool operator==(const RemoveRole&, const RemoveRole&) = default;
};
using Change = std::variant<RemoveEdge, AddRole, RemoveRole>;

/// Tie-break order: every RemoveEdge precedes every role edit; edges by
/// (from, to); role edits by (endpoint, role name), which matches role index
/// order since roles are kept sorted.
bool change_less(const Change& a, const Change& b);

struct RepairPlan {
  std::vector<Change> changes;  // sorted by change_less
  std::size_t cost = 0;
  friend bool operator==(const RepairPlan&, const RepairPlan&) = default;
};

struct InfeasibleWithinBudget {
  std::size_t budget = 0;
  friend bool operator==(const InfeasibleWithinBudget&, const InfeasibleWithinBudget&) = default;
};

using RepairResult = std::variant<RepairPlan, InfeasibleWithinBudget>;

/// Applies a plan functionally. Throws ModelError for changes that do not
/// apply (missing edge, undeclared role, role already present/absent).
SystemModel apply_plan(const SystemModel& model, const RepairPlan& plan);

/// Minimum-cost repair by iterative deepening on cost with branch-and-bound
/// pruning. Without a budget the search runs until the candidate set is
/// exhausted, and an infeasible result carries the size of the full change
/// space (removable edges plus editable role memberships).
RepairResult repair(const CanonicalModel& canon, const SystemModel& model, const ConstraintModel& cm,
                    std::optional<std::size_t> budget = std::nullopt);

/// Enumeration limits for brute_force_repair.
inline constexpr std::size_t kOracleMaxEdges = 12;
inline constexpr std::size_t kOracleMaxRoleEdits = 12;

/// Exhaustive minimum-cost repair over every subset of candidate changes in
/// cost order, checked by a separate first-principles evaluator. Returns
/// InfeasibleWithinBudget(candidate count) when no subset works. Throws
/// ConfigError beyond the enumeration limits.
RepairResult brute_force_repair(const SystemModel& model, const ConstraintModel& cm);

}  // namespace msaverify
