#pragma once

// Constraint evaluation against a variable assignment. Shared by verify
// (assignment = actual system) and repair (assignment = candidate state).

#include <string>
#include <vector>

#include "msaverify/constraints.hpp"
#include "msaverify/model.hpp"
#include "msaverify/solver.hpp"

namespace msaverify::detail {

struct Assignment {
  std::vector<char> edge_present;         // parallel to canon.edges()
  std::vector<std::vector<char>> roles;   // [endpoint][role index]; empty without auth
};

class Evaluator {
 public:
  Evaluator(const CanonicalModel& canon, const SystemModel& model);

  const CanonicalModel& canon() const { return canon_; }
  const SystemModel& model() const { return model_; }
  const std::vector<std::string>& role_names() const { return role_names_; }

  Assignment actual() const;

  /// Throws ModelError on atoms or params the model cannot resolve.
  void check_references(const ConstraintModel& cm) const;

  /// Appends violations of `c`; with `first_only` stops after one.
  /// Returns true when `c` holds.
  bool evaluate(const Constraint& c, const Assignment& a, std::vector<Violation>* out,
                bool first_only) const;

  bool satisfied(const ConstraintModel& cm, const Assignment& a) const;

  /// First cycle among present edges (DFS in index order), or empty.
  std::vector<EndpointId> find_cycle(const Assignment& a) const;

  std::size_t edge_index(const Edge& edge) const;

 private:
  const CanonicalModel& canon_;
  const SystemModel& model_;
  std::vector<std::string> role_names_;
};

/// Edges lying on some cycle of the full canonical graph, by edge position.
std::vector<char> edges_on_cycles(const CanonicalModel& canon);

}  // namespace msaverify::detail
