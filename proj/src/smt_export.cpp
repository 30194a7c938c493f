#include "msaverify/smt_export.hpp"

#include <algorithm>
#include <sstream>

#include "msaverify/error.hpp"

namespace msaverify {

std::string edge_symbol(const Edge& edge) {
  return "edge_" + std::to_string(edge.from) + "_" + std::to_string(edge.to);
}

std::string order_symbol(EndpointId e) { return "L_" + std::to_string(e); }

std::string perm_symbol(EndpointId e, std::size_t role_index) {
  return "perm_" + std::to_string(e) + "_" + std::to_string(role_index);
}

namespace {

class Writer {
 public:
  Writer(const CanonicalModel& canon, const SystemModel& model, const ConstraintModel& cm, SmtMode mode)
      : canon_(canon), model_(model), cm_(cm), mode_(mode) {
    if (model.auth) roles_.assign(model.auth->roles.begin(), model.auth->roles.end());
  }

  SmtDocument write() {
    collect_symbols();
    out_ << "; msaverify constraint export\n";
    out_ << "; mode: " << (mode_ == SmtMode::Verify ? "verify" : "optimize") << "\n";
    out_ << "(set-logic QF_LIA)\n";
    declare();
    pin();
    for (const auto& c : cm_.constraints) emit(c);
    if (mode_ == SmtMode::Optimize) {
      out_ << "(minimize " << objective() << ")\n";
      out_ << "(check-sat)\n(get-objectives)\n(get-model)\n";
    } else {
      out_ << "(check-sat)\n";
    }
    return SmtDocument{out_.str(), mode_, std::move(manifest_)};
  }

 private:
  bool permitted(EndpointId e, std::size_t r) const {
    const auto& roles = model_.endpoints[e].permitted_roles;
    return roles && roles->contains(roles_[r]);
  }

  void collect_symbols() {
    for (const Edge& edge : canon_.edges()) {
      SmtVar v;
      v.kind = SmtVar::Kind::Edge;
      v.edge = edge;
      v.original = true;
      manifest_.emplace(edge_symbol(edge), v);
      edges_.push_back(edge);
    }
    if (cm_.has_kind(ConstraintKind::Cycle)) {
      for (EndpointId e = 0; e < canon_.m(); ++e) {
        SmtVar v;
        v.kind = SmtVar::Kind::Order;
        v.endpoint = e;
        manifest_.emplace(order_symbol(e), v);
      }
    }
    std::set<std::pair<EndpointId, std::size_t>> perms;
    for (const auto& c : cm_.constraints) {
      for (const Atom& atom : c.atoms) {
        if (const auto* r = std::get_if<RoleAtom>(&atom)) perms.emplace(r->endpoint, r->role);
      }
    }
    for (const auto& [e, r] : perms) {
      SmtVar v;
      v.kind = SmtVar::Kind::Permission;
      v.endpoint = e;
      v.role = roles_.at(r);
      v.original = permitted(e, r);
      manifest_.emplace(perm_symbol(e, r), v);
      perms_.emplace_back(e, r);
    }
  }

  void declare() {
    out_ << "; variables\n";
    for (const Edge& edge : edges_) out_ << "(declare-const " << edge_symbol(edge) << " Bool)\n";
    if (cm_.has_kind(ConstraintKind::Cycle)) {
      for (EndpointId e = 0; e < canon_.m(); ++e) out_ << "(declare-const " << order_symbol(e) << " Int)\n";
    }
    for (const auto& [e, r] : perms_) out_ << "(declare-const " << perm_symbol(e, r) << " Bool)\n";
  }

  static std::string literal(const std::string& symbol, bool value) {
    return value ? symbol : "(not " + symbol + ")";
  }

  void pin() {
    const bool pin_edges = mode_ == SmtMode::Verify || !cm_.mutable_vars.edges_free;
    const bool pin_roles = mode_ == SmtMode::Verify || !cm_.mutable_vars.roles_free;
    out_ << "; system state\n";
    for (const Edge& edge : edges_) {
      // Only present edges have symbols; a free edge may only be removed.
      out_ << "(assert " << (pin_edges ? edge_symbol(edge) : "(=> " + edge_symbol(edge) + " true)") << ")\n";
    }
    if (pin_roles) {
      for (const auto& [e, r] : perms_) out_ << "(assert " << literal(perm_symbol(e, r), permitted(e, r)) << ")\n";
    }
  }

  void emit(const Constraint& c) {
    out_ << "; " << c.id << "\n";
    switch (c.kind) {
      case ConstraintKind::Nirc:
        for (const Atom& atom : c.atoms) {
          const Edge& edge = std::get<EdgeAtom>(atom).edge;
          out_ << "(assert (=> " << edge_symbol(edge) << " (distinct " << canon_.parent(edge.from) << " "
               << canon_.parent(edge.to) << ")))\n";
        }
        break;
      case ConstraintKind::Hub: {
        const auto& p = std::get<HubParams>(c.params);
        std::vector<std::string> terms;
        for (const Atom& atom : c.atoms) {
          const Edge& edge = std::get<EdgeAtom>(atom).edge;
          const int weight = (canon_.parent(edge.from) == p.service) + (canon_.parent(edge.to) == p.service);
          terms.push_back("(ite " + edge_symbol(edge) + " " + std::to_string(weight) + " 0)");
        }
        out_ << "(assert (" << (p.strict ? "<" : "<=") << " " << sum(terms) << " " << p.tau << "))\n";
        break;
      }
      case ConstraintKind::Cycle:
        for (const Atom& atom : c.atoms) {
          if (const auto* e = std::get_if<EdgeAtom>(&atom)) {
            out_ << "(assert (=> " << edge_symbol(e->edge) << " (< " << order_symbol(e->edge.from) << " "
                 << order_symbol(e->edge.to) << ")))\n";
          }
        }
        break;
      case ConstraintKind::AuthChain:
        for (const Atom& atom : c.atoms) {
          const auto* e = std::get_if<EdgeAtom>(&atom);
          if (!e) continue;
          for (std::size_t r = 0; r < roles_.size(); ++r) {
            out_ << "(assert (=> (and " << edge_symbol(e->edge) << " " << perm_symbol(e->edge.from, r) << ") "
                 << perm_symbol(e->edge.to, r) << "))\n";
          }
        }
        break;
      case ConstraintKind::AuthEntityConsistency: {
        const auto& group = std::get<ConsistencyParams>(c.params);
        for (std::size_t r = 0; r < roles_.size(); ++r) {
          for (std::size_t i = 1; i < group.endpoints.size(); ++i) {
            out_ << "(assert (= " << perm_symbol(group.endpoints[0], r) << " "
                 << perm_symbol(group.endpoints[i], r) << "))\n";
          }
        }
        break;
      }
    }
  }

  static std::string sum(const std::vector<std::string>& terms) {
    if (terms.empty()) return "0";
    if (terms.size() == 1) return terms.front();
    std::string s = "(+";
    for (const auto& t : terms) s += " " + t;
    return s + ")";
  }

  std::string objective() const {
    std::vector<std::string> terms;
    if (cm_.mutable_vars.edges_free) {
      for (const Edge& edge : edges_) terms.push_back("(ite " + edge_symbol(edge) + " 0 1)");
    }
    if (cm_.mutable_vars.roles_free) {
      for (const auto& [e, r] : perms_) {
        terms.push_back("(ite " + perm_symbol(e, r) + (permitted(e, r) ? " 0 1)" : " 1 0)"));
      }
    }
    return sum(terms);
  }

  const CanonicalModel& canon_;
  const SystemModel& model_;
  const ConstraintModel& cm_;
  SmtMode mode_;
  std::vector<std::string> roles_;
  std::vector<Edge> edges_;
  std::vector<std::pair<EndpointId, std::size_t>> perms_;
  std::map<std::string, SmtVar> manifest_;
  std::ostringstream out_;
};

}  // namespace

SmtDocument export_smtlib(const CanonicalModel& canon, const SystemModel& model, const ConstraintModel& cm,
                          SmtMode mode) {
  return Writer(canon, model, cm, mode).write();
}

}  // namespace msaverify
