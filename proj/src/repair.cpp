// Minimum-change repair: iterative deepening on plan cost, each level a
// depth-first enumeration of candidate subsets in tie-break order with a
// lower-bound cut.
//
// Candidate restriction. A minimum plan contains no change that could be
// dropped, so only changes able to affect a violated constraint matter:
//  - intraservice edges must always be removed (forced into every plan);
//  - with architecture constraints only, the remaining edge candidates are
//    edges on a cycle and edges touching an over-threshold service, since
//    removals cannot create new violations;
//  - with authorization constraints, any edge may matter (role edits can
//    create chain violations), and role edits are limited to endpoints that
//    appear in some authorization constraint.

#include <algorithm>
#include <limits>

#include "evaluation.hpp"
#include "msaverify/error.hpp"
#include "msaverify/solver.hpp"

namespace msaverify {

namespace {

constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

struct Candidate {
  Change change;
  std::size_t edge = kUnbounded;  // edge position, or kUnbounded for role edits
  EndpointId endpoint = 0;
  std::size_t role = 0;
};

class Search {
 public:
  Search(const detail::Evaluator& evaluator, const ConstraintModel& cm, detail::Assignment state,
         std::vector<Candidate> candidates)
      : evaluator_(evaluator), cm_(cm), state_(std::move(state)), candidates_(std::move(candidates)) {
    const auto& canon = evaluator_.canon();
    check_nirc_ = cm_.has_kind(ConstraintKind::Nirc);
    for (const auto& c : cm_.constraints) {
      if (const auto* p = std::get_if<HubParams>(&c.params)) hubs_.push_back(*p);
    }
    sums_.assign(canon.n(), 0);
    for (std::size_t i = 0; i < canon.edges().size(); ++i) {
      if (state_.edge_present[i]) toggle_counts(i, +1);
    }
  }

  // Finds the first subset of `picks` candidates, in lexicographic order,
  // that satisfies every constraint.
  std::optional<std::vector<std::size_t>> run(std::size_t picks) {
    chosen_.clear();
    if (dfs(0, picks)) return chosen_;
    return std::nullopt;
  }

 private:
  void toggle_counts(std::size_t edge, int delta) {
    const auto& canon = evaluator_.canon();
    const Edge& e = canon.edges()[edge];
    const ServiceId a = canon.parent(e.from);
    const ServiceId b = canon.parent(e.to);
    sums_[a] += delta;
    sums_[b] += delta;
    if (a == b) intraservice_ += delta;
  }

  void apply(const Candidate& c) {
    if (c.edge != kUnbounded) {
      state_.edge_present[c.edge] = 0;
      toggle_counts(c.edge, -1);
    } else {
      state_.roles[c.endpoint][c.role] ^= 1;
    }
  }

  void undo(const Candidate& c) {
    if (c.edge != kUnbounded) {
      state_.edge_present[c.edge] = 1;
      toggle_counts(c.edge, +1);
    } else {
      state_.roles[c.endpoint][c.role] ^= 1;
    }
  }

  // Changes still needed by the architecture counts alone. Each removal
  // lowers at most two service sums by one each.
  std::size_t lower_bound() const {
    const bool edges_free = cm_.mutable_vars.edges_free;
    std::size_t bound = 0;
    if (check_nirc_ && intraservice_ > 0) {
      if (!edges_free) return kUnbounded;
      bound = static_cast<std::size_t>(intraservice_);
    }
    long long total_excess = 0;
    long long max_excess = 0;
    for (const auto& hub : hubs_) {
      if (hub.strict && hub.tau == 0) return kUnbounded;
      const long long limit = static_cast<long long>(hub.tau) - (hub.strict ? 1 : 0);
      const long long excess = sums_[hub.service] - limit;
      if (excess <= 0) continue;
      if (!edges_free) return kUnbounded;
      total_excess += excess;
      max_excess = std::max(max_excess, excess);
    }
    bound = std::max<std::size_t>(bound, static_cast<std::size_t>(max_excess));
    bound = std::max<std::size_t>(bound, static_cast<std::size_t>((total_excess + 1) / 2));
    return bound;
  }

  bool dfs(std::size_t start, std::size_t remaining) {
    if (remaining == 0) return evaluator_.satisfied(cm_, state_);
    if (lower_bound() > remaining) return false;
    for (std::size_t i = start; i + remaining <= candidates_.size(); ++i) {
      apply(candidates_[i]);
      chosen_.push_back(i);
      if (dfs(i + 1, remaining - 1)) return true;
      chosen_.pop_back();
      undo(candidates_[i]);
    }
    return false;
  }

  const detail::Evaluator& evaluator_;
  const ConstraintModel& cm_;
  detail::Assignment state_;
  std::vector<Candidate> candidates_;
  std::vector<std::size_t> chosen_;
  std::vector<HubParams> hubs_;
  std::vector<long long> sums_;
  long long intraservice_ = 0;
  bool check_nirc_ = false;
};

}  // namespace

RepairResult repair(const CanonicalModel& canon, const SystemModel& model, const ConstraintModel& cm,
                    std::optional<std::size_t> budget) {
  detail::Evaluator evaluator(canon, model);
  evaluator.check_references(cm);
  detail::Assignment state = evaluator.actual();
  if (evaluator.satisfied(cm, state)) return RepairPlan{};
  if (budget && *budget == 0) return InfeasibleWithinBudget{0};

  const auto edges = canon.edges();
  const bool with_auth = cm.has_concern(Concern::Authorization);
  const auto& profile = cm.mutable_vars;

  std::vector<Candidate> forced;
  std::vector<Candidate> candidates;

  if (profile.edges_free) {
    const bool nirc = cm.has_kind(ConstraintKind::Nirc);
    std::vector<char> relevant(edges.size(), with_auth ? 1 : 0);
    if (!with_auth) {
      if (cm.has_kind(ConstraintKind::Cycle)) relevant = detail::edges_on_cycles(canon);
      const auto sums = service_degree_sums(canon);
      for (const auto& c : cm.constraints) {
        const auto* hub = std::get_if<HubParams>(&c.params);
        if (!hub) continue;
        const std::size_t sum = sums[hub->service];
        if (hub->strict ? sum < hub->tau : sum <= hub->tau) continue;
        for (std::size_t i = 0; i < edges.size(); ++i) {
          if (canon.parent(edges[i].from) == hub->service || canon.parent(edges[i].to) == hub->service) {
            relevant[i] = 1;
          }
        }
      }
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
      Candidate c{RemoveEdge{edges[i]}, i};
      if (nirc && canon.parent(edges[i].from) == canon.parent(edges[i].to)) {
        forced.push_back(std::move(c));
      } else if (relevant[i]) {
        candidates.push_back(std::move(c));
      }
    }
  }

  if (profile.roles_free && with_auth && model.auth) {
    std::set<EndpointId> scope;
    for (const auto& c : cm.constraints) {
      if (c.concern != Concern::Authorization) continue;
      for (const Atom& atom : c.atoms) {
        if (const auto* r = std::get_if<RoleAtom>(&atom)) scope.insert(r->endpoint);
      }
    }
    const auto& names = evaluator.role_names();
    for (EndpointId e : scope) {
      for (std::size_t r = 0; r < names.size(); ++r) {
        Candidate c;
        c.endpoint = e;
        c.role = r;
        if (state.roles[e][r]) {
          c.change = RemoveRole{e, names[r]};
        } else {
          c.change = AddRole{e, names[r]};
        }
        candidates.push_back(std::move(c));
      }
    }
  }

  // Edge candidates were pushed in edge order and role edits in
  // (endpoint, role) order, which is already change_less order.
  const std::size_t base = forced.size();
  const std::size_t ceiling = base + candidates.size();
  const std::size_t limit = budget ? std::min(*budget, ceiling) : ceiling;
  // Without a budget, infeasibility is reported against the size of the
  // whole change space, not the pruned candidate list.
  std::size_t space = profile.edges_free ? edges.size() : 0;
  if (profile.roles_free && with_auth && model.auth) space += canon.m() * evaluator.role_names().size();
  const InfeasibleWithinBudget exhausted{budget ? *budget : space};
  if (base > limit) return exhausted;

  for (const auto& c : forced) {
    state.edge_present[c.edge] = 0;
  }
  Search search(evaluator, cm, std::move(state), candidates);
  for (std::size_t cost = std::max<std::size_t>(base, 1); cost <= limit; ++cost) {
    if (auto picks = search.run(cost - base)) {
      RepairPlan plan;
      for (const auto& c : forced) plan.changes.push_back(c.change);
      for (std::size_t i : *picks) plan.changes.push_back(candidates[i].change);
      std::sort(plan.changes.begin(), plan.changes.end(), change_less);
      plan.cost = plan.changes.size();
      return plan;
    }
  }
  return exhausted;
}

}  // namespace msaverify
