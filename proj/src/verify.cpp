#include <algorithm>
#include <deque>

#include "evaluation.hpp"
#include "msaverify/error.hpp"
#include "msaverify/solver.hpp"

namespace msaverify {

namespace detail {

Evaluator::Evaluator(const CanonicalModel& canon, const SystemModel& model)
    : canon_(canon), model_(model) {
  if (model.auth) role_names_.assign(model.auth->roles.begin(), model.auth->roles.end());
}

Assignment Evaluator::actual() const {
  Assignment a;
  a.edge_present.assign(canon_.edges().size(), 1);
  if (model_.auth) {
    a.roles.assign(canon_.m(), std::vector<char>(role_names_.size(), 0));
    for (const auto& endpoint : model_.endpoints) {
      if (!endpoint.permitted_roles) continue;
      for (const auto& role : *endpoint.permitted_roles) {
        auto it = std::lower_bound(role_names_.begin(), role_names_.end(), role);
        a.roles[endpoint.index][static_cast<std::size_t>(it - role_names_.begin())] = 1;
      }
    }
  }
  return a;
}

std::size_t Evaluator::edge_index(const Edge& edge) const {
  auto pos = canon_.edge_position(edge);
  if (!pos) {
    throw ModelError("constraint references edge (" + std::to_string(edge.from) + "," +
                     std::to_string(edge.to) + ") absent from the model");
  }
  return *pos;
}

void Evaluator::check_references(const ConstraintModel& cm) const {
  const std::size_t m = canon_.m();
  for (const auto& c : cm.constraints) {
    for (const Atom& atom : c.atoms) {
      if (const auto* e = std::get_if<EdgeAtom>(&atom)) {
        edge_index(e->edge);
      } else if (const auto* o = std::get_if<OrderAtom>(&atom)) {
        if (o->endpoint >= m) throw ModelError(c.id + ": ordering atom for missing endpoint");
      } else if (const auto* r = std::get_if<RoleAtom>(&atom)) {
        if (r->endpoint >= m || r->role >= role_names_.size()) {
          throw ModelError(c.id + ": role atom references a missing endpoint or role");
        }
      }
    }
    if (const auto* hub = std::get_if<HubParams>(&c.params)) {
      if (hub->service >= canon_.n()) throw ModelError(c.id + ": hub constraint for missing service");
    }
    if (const auto* group = std::get_if<ConsistencyParams>(&c.params)) {
      for (EndpointId e : group->endpoints) {
        if (e >= m) throw ModelError(c.id + ": consistency group references a missing endpoint");
      }
    }
    const bool needs_roles = c.kind == ConstraintKind::AuthChain ||
                             c.kind == ConstraintKind::AuthEntityConsistency;
    if (needs_roles && !model_.auth) throw ModelError(c.id + ": model has no auth extension");
  }
}

std::vector<EndpointId> Evaluator::find_cycle(const Assignment& a) const {
  const std::size_t m = canon_.m();
  enum : char { kWhite, kGray, kBlack };
  std::vector<char> color(m, kWhite);
  struct Frame {
    EndpointId node;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (EndpointId root = 0; root < m; ++root) {
    if (color[root] != kWhite) continue;
    stack.push_back({root, 0});
    color[root] = kGray;
    while (!stack.empty()) {
      Frame& top = stack.back();
      const auto succ = canon_.successors(top.node);
      if (top.next == succ.size()) {
        color[top.node] = kBlack;
        stack.pop_back();
        continue;
      }
      const std::size_t k = top.next++;
      if (!a.edge_present[canon_.out_edge_begin(top.node) + k]) continue;
      const EndpointId next = succ[k];
      if (color[next] == kGray) {
        std::vector<EndpointId> cycle;
        auto it = std::find_if(stack.begin(), stack.end(), [&](const Frame& f) { return f.node == next; });
        for (; it != stack.end(); ++it) cycle.push_back(it->node);
        cycle.push_back(next);
        return cycle;
      }
      if (color[next] == kWhite) {
        color[next] = kGray;
        stack.push_back({next, 0});
      }
    }
  }
  return {};
}

bool Evaluator::evaluate(const Constraint& c, const Assignment& a, std::vector<Violation>* out,
                         bool first_only) const {
  bool holds = true;
  auto report = [&](Witness witness) {
    holds = false;
    if (out) out->push_back({c.id, c.kind, c.concern, std::move(witness)});
  };
  auto present = [&](const Edge& edge) { return a.edge_present[edge_index(edge)] != 0; };

  switch (c.kind) {
    case ConstraintKind::Nirc:
      for (const Atom& atom : c.atoms) {
        const Edge& edge = std::get<EdgeAtom>(atom).edge;
        if (present(edge) && canon_.parent(edge.from) == canon_.parent(edge.to)) {
          report(NircWitness{edge, canon_.parent(edge.from)});
          if (first_only) return false;
        }
      }
      break;

    case ConstraintKind::Hub: {
      const auto& params = std::get<HubParams>(c.params);
      std::size_t sum = 0;
      for (const Atom& atom : c.atoms) {
        const Edge& edge = std::get<EdgeAtom>(atom).edge;
        if (!present(edge)) continue;
        sum += (canon_.parent(edge.from) == params.service) + (canon_.parent(edge.to) == params.service);
      }
      const bool ok = params.strict ? sum < params.tau : sum <= params.tau;
      if (!ok) report(HubWitness{params.service, sum, params.tau, params.strict});
      break;
    }

    case ConstraintKind::Cycle:
      if (auto cycle = find_cycle(a); !cycle.empty()) report(CycleWitness{std::move(cycle)});
      break;

    case ConstraintKind::AuthChain:
      for (const Atom& atom : c.atoms) {
        const auto* e = std::get_if<EdgeAtom>(&atom);
        if (!e || !present(e->edge)) continue;
        const auto& caller = a.roles[e->edge.from];
        const auto& callee = a.roles[e->edge.to];
        for (std::size_t r = 0; r < role_names_.size(); ++r) {
          if (caller[r] && !callee[r]) {
            report(ChainWitness{e->edge, role_names_[r]});
            if (first_only) return false;
          }
        }
      }
      break;

    case ConstraintKind::AuthEntityConsistency: {
      const auto& group = std::get<ConsistencyParams>(c.params);
      for (std::size_t r = 0; r < role_names_.size(); ++r) {
        std::optional<EndpointId> holder;
        std::optional<EndpointId> lacking;
        for (EndpointId e : group.endpoints) {
          if (a.roles[e][r]) {
            if (!holder) holder = e;
          } else if (!lacking) {
            lacking = e;
          }
        }
        if (holder && lacking) {
          report(ConsistencyWitness{group.entity, group.operation, role_names_[r], *holder, *lacking});
          if (first_only) return false;
        }
      }
      break;
    }
  }
  return holds;
}

bool Evaluator::satisfied(const ConstraintModel& cm, const Assignment& a) const {
  return std::all_of(cm.constraints.begin(), cm.constraints.end(),
                     [&](const Constraint& c) { return evaluate(c, a, nullptr, true); });
}

// Kosaraju over the CSR indexes; an edge is on a cycle iff both ends share
// a strongly connected component (self-loops included).
std::vector<char> edges_on_cycles(const CanonicalModel& canon) {
  const std::size_t m = canon.m();
  std::vector<char> seen(m, 0);
  std::vector<EndpointId> finish;
  finish.reserve(m);
  std::vector<std::pair<EndpointId, std::size_t>> stack;
  for (EndpointId root = 0; root < m; ++root) {
    if (seen[root]) continue;
    seen[root] = 1;
    stack.push_back({root, 0});
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      const auto succ = canon.successors(node);
      if (next == succ.size()) {
        finish.push_back(node);
        stack.pop_back();
        continue;
      }
      const EndpointId child = succ[next++];
      if (!seen[child]) {
        seen[child] = 1;
        stack.push_back({child, 0});
      }
    }
  }
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> component(m, kNone);
  std::size_t count = 0;
  std::vector<EndpointId> work;
  for (auto it = finish.rbegin(); it != finish.rend(); ++it) {
    if (component[*it] != kNone) continue;
    component[*it] = count;
    work.push_back(*it);
    while (!work.empty()) {
      const EndpointId node = work.back();
      work.pop_back();
      for (EndpointId pred : canon.predecessors(node)) {
        if (component[pred] == kNone) {
          component[pred] = count;
          work.push_back(pred);
        }
      }
    }
    ++count;
  }
  std::vector<char> on_cycle(canon.edges().size(), 0);
  for (std::size_t i = 0; i < canon.edges().size(); ++i) {
    const Edge& edge = canon.edges()[i];
    on_cycle[i] = component[edge.from] == component[edge.to];
  }
  return on_cycle;
}

}  // namespace detail

Verdict verify(const CanonicalModel& canon, const SystemModel& model, const ConstraintModel& cm) {
  if (canon.m() != model.endpoints.size() || canon.n() != model.microservices.size()) {
    throw ModelError("canonical model does not match the system model");
  }
  detail::Evaluator evaluator(canon, model);
  evaluator.check_references(cm);
  const auto actual = evaluator.actual();
  Verdict verdict;
  for (const auto& c : cm.constraints) evaluator.evaluate(c, actual, &verdict.violations, false);
  verdict.overall = verdict.violations.empty() ? Status::Sat : Status::Unsat;
  return verdict;
}

std::vector<EndpointId> find_cycle(const CanonicalModel& canon) {
  SystemModel empty;
  detail::Evaluator evaluator(canon, empty);
  detail::Assignment all;
  all.edge_present.assign(canon.edges().size(), 1);
  return evaluator.find_cycle(all);
}

TopoResult topo_witness(const CanonicalModel& canon) {
  const std::size_t m = canon.m();
  std::vector<std::size_t> indegree(m, 0);
  for (const Edge& edge : canon.edges()) ++indegree[edge.to];
  std::deque<EndpointId> ready;
  for (EndpointId e = 0; e < m; ++e) {
    if (indegree[e] == 0) ready.push_back(e);
  }
  std::vector<long long> labels(m, 0);
  long long next_label = 0;
  std::size_t placed = 0;
  while (!ready.empty()) {
    const EndpointId e = ready.front();
    ready.pop_front();
    labels[e] = next_label++;
    ++placed;
    for (EndpointId succ : canon.successors(e)) {
      if (--indegree[succ] == 0) ready.push_back(succ);
    }
  }
  TopoResult result;
  if (placed == m) {
    result.witness = TopoWitness{std::move(labels)};
  } else {
    result.cycle = find_cycle(canon);
  }
  return result;
}

AtomViolationCounts count_violated_atoms(const CanonicalModel& canon, const ConstraintModel& cm) {
  AtomViolationCounts counts;
  const auto edges = canon.edges();
  if (cm.has_kind(ConstraintKind::Nirc)) {
    counts.nirc = static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [&](const Edge& e) {
      return canon.parent(e.from) == canon.parent(e.to);
    }));
  }
  const auto sums = service_degree_sums(canon);
  for (const auto& c : cm.constraints) {
    if (c.kind != ConstraintKind::Hub) continue;
    const auto& p = std::get<HubParams>(c.params);
    const std::size_t sum = p.service < sums.size() ? sums[p.service] : 0;
    if (p.strict ? sum >= p.tau : sum > p.tau) ++counts.hub;
  }
  if (cm.has_kind(ConstraintKind::Cycle)) {
    const auto on_cycle = detail::edges_on_cycles(canon);
    counts.cycle = static_cast<std::size_t>(std::count(on_cycle.begin(), on_cycle.end(), 1));
  }
  return counts;
}

}  // namespace msaverify
