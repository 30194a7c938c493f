#include "msaverify/constraints.hpp"

#include <algorithm>
#include <map>

#include "msaverify/error.hpp"

namespace msaverify {

std::string_view to_string(Concern concern) {
  return concern == Concern::Architecture ? "ARCHITECTURE" : "AUTHORIZATION";
}

std::string_view to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::Nirc: return "NIRC";
    case ConstraintKind::Hub: return "HUB";
    case ConstraintKind::Cycle: return "CYCLE";
    case ConstraintKind::AuthEntityConsistency: return "AUTH_ENTITY_CONSISTENCY";
    case ConstraintKind::AuthChain: return "AUTH_CHAIN";
  }
  return "?";
}

std::optional<Concern> concern_from_string(std::string_view text) {
  for (Concern c : {Concern::Architecture, Concern::Authorization}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::optional<ConstraintKind> kind_from_string(std::string_view text) {
  for (ConstraintKind k : {ConstraintKind::Nirc, ConstraintKind::Hub, ConstraintKind::Cycle,
                           ConstraintKind::AuthEntityConsistency, ConstraintKind::AuthChain}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

Concern concern_of(ConstraintKind kind) {
  return kind == ConstraintKind::AuthChain || kind == ConstraintKind::AuthEntityConsistency
             ? Concern::Authorization
             : Concern::Architecture;
}

bool ConstraintModel::has_kind(ConstraintKind kind) const {
  return std::any_of(constraints.begin(), constraints.end(),
                     [kind](const Constraint& c) { return c.kind == kind; });
}

bool ConstraintModel::has_concern(Concern concern) const {
  return std::any_of(constraints.begin(), constraints.end(),
                     [concern](const Constraint& c) { return c.concern == concern; });
}

std::vector<Constraint> gen_nirc(const CanonicalModel& canon) {
  Constraint c;
  c.id = "arch.nirc";
  c.concern = Concern::Architecture;
  c.kind = ConstraintKind::Nirc;
  for (const Edge& edge : canon.edges()) c.atoms.push_back(EdgeAtom{edge});
  return {std::move(c)};
}

std::vector<Constraint> gen_hub(const CanonicalModel& canon, std::size_t tau, bool strict) {
  std::vector<Constraint> out(canon.n());
  for (ServiceId s = 0; s < canon.n(); ++s) {
    out[s].id = "arch.hub." + std::to_string(s);
    out[s].concern = Concern::Architecture;
    out[s].kind = ConstraintKind::Hub;
    out[s].params = HubParams{s, tau, strict};
  }
  // An edge is an atom of each service it touches (once if both ends share it).
  for (const Edge& edge : canon.edges()) {
    const ServiceId a = canon.parent(edge.from);
    const ServiceId b = canon.parent(edge.to);
    out[a].atoms.push_back(EdgeAtom{edge});
    if (b != a) out[b].atoms.push_back(EdgeAtom{edge});
  }
  return out;
}

std::vector<Constraint> gen_cycle(const CanonicalModel& canon) {
  Constraint c;
  c.id = "arch.cycle";
  c.concern = Concern::Architecture;
  c.kind = ConstraintKind::Cycle;
  c.atoms.reserve(canon.m() + canon.edges().size());
  for (EndpointId e = 0; e < canon.m(); ++e) c.atoms.push_back(OrderAtom{e});
  for (const Edge& edge : canon.edges()) c.atoms.push_back(EdgeAtom{edge});
  return {std::move(c)};
}

std::vector<Constraint> gen_auth(const SystemModel& model) {
  if (!model.auth) throw ConfigError("authorization constraints need an auth extension");
  const auto& auth = *model.auth;
  const std::size_t n_roles = auth.roles.size();
  std::vector<Constraint> out;

  // (entity, operation) -> accessing endpoints; map order gives the
  // deterministic (entity, operation) constraint order.
  std::map<std::pair<std::string, Operation>, std::set<EndpointId>> groups;
  for (const auto& access : auth.accesses) {
    for (Operation op : access.operations) groups[{access.entity, op}].insert(access.endpoint);
  }
  for (const auto& [key, endpoints] : groups) {
    if (endpoints.size() < 2) continue;  // a single accessor is trivially consistent
    Constraint c;
    c.id = "auth.consistency." + key.first + "." + std::string(to_string(key.second));
    c.concern = Concern::Authorization;
    c.kind = ConstraintKind::AuthEntityConsistency;
    c.params = ConsistencyParams{key.first, key.second, {endpoints.begin(), endpoints.end()}};
    for (EndpointId e : endpoints) {
      for (std::size_t r = 0; r < n_roles; ++r) c.atoms.push_back(RoleAtom{e, r});
    }
    out.push_back(std::move(c));
  }

  Constraint chain;
  chain.id = "auth.chain";
  chain.concern = Concern::Authorization;
  chain.kind = ConstraintKind::AuthChain;
  std::set<EndpointId> touched;
  for (const Edge& edge : model.edges) {
    chain.atoms.push_back(EdgeAtom{edge});
    touched.insert(edge.from);
    touched.insert(edge.to);
  }
  for (EndpointId e : touched) {
    for (std::size_t r = 0; r < n_roles; ++r) chain.atoms.push_back(RoleAtom{e, r});
  }
  out.push_back(std::move(chain));
  return out;
}

ConstraintModel assemble(const CanonicalModel& canon, const SystemModel& model,
                         const AssembleOptions& options) {
  ConstraintModel cm;
  cm.mutable_vars = options.profile;
  if (options.concerns.contains(Concern::Architecture)) {
    if (!options.tau) throw ConfigError("architecture concern needs a hub threshold (tau)");
    for (auto& c : gen_nirc(canon)) cm.constraints.push_back(std::move(c));
    for (auto& c : gen_hub(canon, *options.tau, options.hub_strict)) cm.constraints.push_back(std::move(c));
    for (auto& c : gen_cycle(canon)) cm.constraints.push_back(std::move(c));
  }
  if (options.concerns.contains(Concern::Authorization)) {
    if (!model.auth) throw ConfigError("authorization concern requested but the model has no auth extension");
    for (auto& c : gen_auth(model)) cm.constraints.push_back(std::move(c));
  }
  return cm;
}

}  // namespace msaverify
