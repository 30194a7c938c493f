// Plan application, witness re-checking and the exhaustive repair oracle.
// Everything here works on SystemModel directly and does not share
// evaluation code with verify/repair.

#include <algorithm>
#include <functional>
#include <map>
#include <tuple>

#include "msaverify/error.hpp"
#include "msaverify/solver.hpp"

namespace msaverify {

namespace {

std::tuple<int, std::size_t, std::size_t, std::string> change_key(const Change& change) {
  if (const auto* r = std::get_if<RemoveEdge>(&change)) return {0, r->edge.from, r->edge.to, {}};
  if (const auto* a = std::get_if<AddRole>(&change)) return {1, a->endpoint, 0, a->role};
  const auto& d = std::get<RemoveRole>(change);
  return {1, d.endpoint, 0, d.role};
}

const std::set<std::string>& roles_of(const SystemModel& model, EndpointId e) {
  static const std::set<std::string> kNone;
  const auto& roles = model.endpoints.at(e).permitted_roles;
  return roles ? *roles : kNone;
}

std::size_t degree_sum(const SystemModel& model, ServiceId service) {
  std::size_t sum = 0;
  for (const Edge& edge : model.edges) {
    if (model.endpoints[edge.from].parent == service) ++sum;
    if (model.endpoints[edge.to].parent == service) ++sum;
  }
  return sum;
}

// What the constraint model asks for, recovered from its constraints.
struct Rules {
  bool nirc = false;
  bool cycle = false;
  bool chain = false;
  bool consistency = false;
  std::optional<HubParams> hub;  // tau/strict shared by every service
};

Rules rules_of(const ConstraintModel& cm) {
  Rules rules;
  for (const auto& c : cm.constraints) {
    switch (c.kind) {
      case ConstraintKind::Nirc: rules.nirc = true; break;
      case ConstraintKind::Cycle: rules.cycle = true; break;
      case ConstraintKind::AuthChain: rules.chain = true; break;
      case ConstraintKind::AuthEntityConsistency: rules.consistency = true; break;
      case ConstraintKind::Hub: rules.hub = std::get<HubParams>(c.params); break;
    }
  }
  return rules;
}

bool has_cycle(const SystemModel& model) {
  std::vector<std::vector<EndpointId>> adjacency(model.endpoints.size());
  for (const Edge& edge : model.edges) adjacency[edge.from].push_back(edge.to);
  std::vector<int> state(model.endpoints.size(), 0);  // 0 new, 1 open, 2 done
  std::function<bool(EndpointId)> visit = [&](EndpointId e) {
    state[e] = 1;
    for (EndpointId next : adjacency[e]) {
      if (state[next] == 1) return true;
      if (state[next] == 0 && visit(next)) return true;
    }
    state[e] = 2;
    return false;
  };
  for (EndpointId e = 0; e < model.endpoints.size(); ++e) {
    if (state[e] == 0 && visit(e)) return true;
  }
  return false;
}

bool conforms(const SystemModel& model, const Rules& rules) {
  if (rules.nirc) {
    for (const Edge& edge : model.edges) {
      if (model.endpoints[edge.from].parent == model.endpoints[edge.to].parent) return false;
    }
  }
  if (rules.hub) {
    for (ServiceId s = 0; s < model.microservices.size(); ++s) {
      const std::size_t sum = degree_sum(model, s);
      if (rules.hub->strict ? !(sum < rules.hub->tau) : sum > rules.hub->tau) return false;
    }
  }
  if (rules.cycle && has_cycle(model)) return false;
  if (rules.chain) {
    for (const Edge& edge : model.edges) {
      const auto& callee = roles_of(model, edge.to);
      for (const auto& role : roles_of(model, edge.from)) {
        if (!callee.contains(role)) return false;
      }
    }
  }
  if (rules.consistency && model.auth) {
    std::map<std::pair<std::string, Operation>, std::vector<EndpointId>> groups;
    for (const auto& access : model.auth->accesses) {
      for (Operation op : access.operations) groups[{access.entity, op}].push_back(access.endpoint);
    }
    for (const auto& [_, members] : groups) {
      for (EndpointId e : members) {
        if (roles_of(model, e) != roles_of(model, members.front())) return false;
      }
    }
  }
  return true;
}

}  // namespace

bool change_less(const Change& a, const Change& b) { return change_key(a) < change_key(b); }

SystemModel apply_plan(const SystemModel& model, const RepairPlan& plan) {
  SystemModel out = model;
  for (const Change& change : plan.changes) {
    if (const auto* r = std::get_if<RemoveEdge>(&change)) {
      if (!out.edges.erase(r->edge)) {
        throw ModelError("cannot remove missing edge (" + std::to_string(r->edge.from) + "," +
                         std::to_string(r->edge.to) + ")");
      }
      continue;
    }
    const bool add = std::holds_alternative<AddRole>(change);
    const EndpointId e = add ? std::get<AddRole>(change).endpoint : std::get<RemoveRole>(change).endpoint;
    const std::string& role = add ? std::get<AddRole>(change).role : std::get<RemoveRole>(change).role;
    if (!out.auth || !out.auth->roles.contains(role)) throw ModelError("role '" + role + "' is not declared");
    if (e >= out.endpoints.size() || !out.endpoints[e].permitted_roles) {
      throw ModelError("role edit on missing endpoint " + std::to_string(e));
    }
    auto& roles = *out.endpoints[e].permitted_roles;
    if (add ? !roles.insert(role).second : roles.erase(role) == 0) {
      throw ModelError("role edit for '" + role + "' on endpoint " + std::to_string(e) + " does not apply");
    }
  }
  return out;
}

bool witness_holds(const SystemModel& model, const Violation& violation) {
  const std::size_t m = model.endpoints.size();
  auto edge_exists = [&](const Edge& edge) { return model.edges.contains(edge); };
  auto parent = [&](EndpointId e) { return model.endpoints[e].parent; };

  return std::visit(
      [&](const auto& w) -> bool {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, NircWitness>) {
          return edge_exists(w.edge) && parent(w.edge.from) == w.parent && parent(w.edge.to) == w.parent;
        } else if constexpr (std::is_same_v<W, HubWitness>) {
          if (w.service >= model.microservices.size()) return false;
          const std::size_t sum = degree_sum(model, w.service);
          return sum == w.sum && (w.strict ? sum >= w.tau : sum > w.tau);
        } else if constexpr (std::is_same_v<W, CycleWitness>) {
          if (w.path.size() < 2 || w.path.front() != w.path.back()) return false;
          for (std::size_t i = 0; i + 1 < w.path.size(); ++i) {
            if (w.path[i] >= m || !edge_exists({w.path[i], w.path[i + 1]})) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<W, ChainWitness>) {
          return edge_exists(w.edge) && roles_of(model, w.edge.from).contains(w.role) &&
                 !roles_of(model, w.edge.to).contains(w.role);
        } else {
          if (!model.auth || w.holder >= m || w.lacking >= m) return false;
          auto accesses = [&](EndpointId e) {
            return std::any_of(model.auth->accesses.begin(), model.auth->accesses.end(), [&](const EntityAccess& a) {
              return a.endpoint == e && a.entity == w.entity && a.operations.contains(w.operation);
            });
          };
          return accesses(w.holder) && accesses(w.lacking) && roles_of(model, w.holder).contains(w.role) &&
                 !roles_of(model, w.lacking).contains(w.role);
        }
      },
      violation.witness);
}

namespace {

// Compact state for exhaustive search: edge presence flags and one role
// bitmask per endpoint. Conformance is re-derived here with Kahn's
// algorithm for acyclicity, independent of the repair evaluator.
class CompactSystem {
 public:
  CompactSystem(const SystemModel& model, const Rules& rules) : rules_(rules) {
    edges_.assign(model.edges.begin(), model.edges.end());
    present_.assign(edges_.size(), 1);
    for (const auto& endpoint : model.endpoints) parents_.push_back(endpoint.parent);
    sums_.assign(model.microservices.size(), 0);
    std::map<EndpointId, std::size_t> local;
    for (const Edge& e : edges_) {
      local.emplace(e.from, local.size());
      local.emplace(e.to, local.size());
    }
    for (const Edge& e : edges_) local_edges_.emplace_back(local.at(e.from), local.at(e.to));
    indegree_.assign(local.size(), 0);
    out_.assign(local.size(), {});
    for (std::size_t i = 0; i < edges_.size(); ++i) out_[local_edges_[i].first].push_back(i);
    if (model.auth) {
      role_names_.assign(model.auth->roles.begin(), model.auth->roles.end());
      if (role_names_.size() > 64) throw ConfigError("exhaustive repair supports at most 64 roles");
      masks_.assign(model.endpoints.size(), 0);
      for (const auto& endpoint : model.endpoints) {
        for (const auto& role : roles_of(model, endpoint.index)) masks_[endpoint.index] |= bit(role);
      }
      std::map<std::pair<std::string, Operation>, std::vector<EndpointId>> groups;
      for (const auto& access : model.auth->accesses) {
        for (Operation op : access.operations) groups[{access.entity, op}].push_back(access.endpoint);
      }
      for (auto& [_, members] : groups) groups_.push_back(std::move(members));
    }
  }

  std::size_t edge_slot(const Edge& edge) const {
    return static_cast<std::size_t>(std::lower_bound(edges_.begin(), edges_.end(), edge) - edges_.begin());
  }
  std::uint64_t bit(const std::string& role) const {
    const auto it = std::lower_bound(role_names_.begin(), role_names_.end(), role);
    return std::uint64_t{1} << static_cast<std::size_t>(it - role_names_.begin());
  }

  // Candidate changes are involutions on the compact state.
  void toggle(const Change& change, std::size_t slot) {
    if (std::holds_alternative<RemoveEdge>(change)) {
      present_[slot] ^= 1;
      return;
    }
    const EndpointId e = std::holds_alternative<AddRole>(change) ? std::get<AddRole>(change).endpoint
                                                                   : std::get<RemoveRole>(change).endpoint;
    masks_[e] ^= static_cast<std::uint64_t>(slot);
  }

  bool conforms() {
    if (rules_.nirc) {
      for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (present_[i] && parents_[edges_[i].from] == parents_[edges_[i].to]) return false;
      }
    }
    if (rules_.hub) {
      std::fill(sums_.begin(), sums_.end(), 0);
      for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (!present_[i]) continue;
        ++sums_[parents_[edges_[i].from]];
        ++sums_[parents_[edges_[i].to]];
      }
      for (std::size_t sum : sums_) {
        if (rules_.hub->strict ? sum >= rules_.hub->tau : sum > rules_.hub->tau) return false;
      }
    }
    if (rules_.cycle && !acyclic()) return false;
    if (rules_.chain) {
      for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (present_[i] && (masks_[edges_[i].from] & ~masks_[edges_[i].to]) != 0) return false;
      }
    }
    if (rules_.consistency) {
      for (const auto& members : groups_) {
        for (EndpointId e : members) {
          if (masks_[e] != masks_[members.front()]) return false;
        }
      }
    }
    return true;
  }

 private:
  bool acyclic() {
    std::fill(indegree_.begin(), indegree_.end(), 0);
    std::size_t remaining = 0;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      if (!present_[i]) continue;
      ++indegree_[local_edges_[i].second];
      ++remaining;
    }
    ready_.clear();
    for (std::size_t v = 0; v < indegree_.size(); ++v) {
      if (indegree_[v] == 0) ready_.push_back(v);
    }
    while (!ready_.empty()) {
      const std::size_t v = ready_.back();
      ready_.pop_back();
      for (std::size_t i : out_[v]) {
        if (!present_[i]) continue;
        --remaining;
        if (--indegree_[local_edges_[i].second] == 0) ready_.push_back(local_edges_[i].second);
      }
    }
    return remaining == 0;
  }

  const Rules& rules_;
  std::vector<Edge> edges_;
  std::vector<char> present_;
  std::vector<ServiceId> parents_;
  std::vector<std::size_t> sums_;
  std::vector<std::pair<std::size_t, std::size_t>> local_edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::size_t> indegree_;
  std::vector<std::size_t> ready_;
  std::vector<std::string> role_names_;
  std::vector<std::uint64_t> masks_;
  std::vector<std::vector<EndpointId>> groups_;
};

}  // namespace

RepairResult brute_force_repair(const SystemModel& model, const ConstraintModel& cm) {
  const Rules rules = rules_of(cm);
  std::vector<Change> candidates;
  std::size_t edge_candidates = 0;
  std::size_t role_candidates = 0;
  if (cm.mutable_vars.edges_free) {
    for (const Edge& edge : model.edges) candidates.push_back(RemoveEdge{edge});
    edge_candidates = model.edges.size();
  }
  if (cm.mutable_vars.roles_free && model.auth && (rules.chain || rules.consistency)) {
    for (const auto& endpoint : model.endpoints) {
      for (const auto& role : model.auth->roles) {
        if (roles_of(model, endpoint.index).contains(role)) {
          candidates.push_back(RemoveRole{endpoint.index, role});
        } else {
          candidates.push_back(AddRole{endpoint.index, role});
        }
        ++role_candidates;
      }
    }
  }
  if (edge_candidates > kOracleMaxEdges || role_candidates > kOracleMaxRoleEdits) {
    throw ConfigError("instance too large for exhaustive repair (" + std::to_string(edge_candidates) +
                      " edges, " + std::to_string(role_candidates) + " role edits)");
  }
  std::sort(candidates.begin(), candidates.end(), change_less);

  CompactSystem system(model, rules);
  // Edge position for removals, role bit for role edits.
  std::vector<std::size_t> slots;
  for (const Change& change : candidates) {
    if (const auto* r = std::get_if<RemoveEdge>(&change)) {
      slots.push_back(system.edge_slot(r->edge));
    } else {
      const std::string& role = std::holds_alternative<AddRole>(change) ? std::get<AddRole>(change).role
                                                                         : std::get<RemoveRole>(change).role;
      slots.push_back(static_cast<std::size_t>(system.bit(role)));
    }
  }

  // k-subsets in lexicographic order, for k = 0, 1, 2, ...
  const std::size_t n = candidates.size();
  std::vector<std::size_t> pick;
  std::function<bool(std::size_t, std::size_t)> choose = [&](std::size_t start, std::size_t left) {
    if (left == 0) return system.conforms();
    for (std::size_t i = start; i + left <= n; ++i) {
      system.toggle(candidates[i], slots[i]);
      pick.push_back(i);
      if (choose(i + 1, left - 1)) return true;
      pick.pop_back();
      system.toggle(candidates[i], slots[i]);
    }
    return false;
  };
  for (std::size_t k = 0; k <= n; ++k) {
    if (!choose(0, k)) continue;
    RepairPlan plan;
    for (std::size_t i : pick) plan.changes.push_back(candidates[i]);
    plan.cost = k;
    // Cross-check the compact search against the model-level definition.
    if (!conforms(apply_plan(model, plan), rules)) throw std::logic_error("exhaustive repair state diverged");
    return plan;
  }
  return InfeasibleWithinBudget{n};
}

}  // namespace msaverify
