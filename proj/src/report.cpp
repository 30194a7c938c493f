#include "msaverify/report.hpp"

#include <nlohmann/json.hpp>
#include <sstream>

#include "msaverify/error.hpp"

namespace msaverify {

using nlohmann::ordered_json;

namespace {

std::string edge_text(const Edge& edge) {
  return "E_" + std::to_string(edge.from) + "→E_" + std::to_string(edge.to);
}

std::string describe(const SystemModel& model, const Violation& v) {
  auto label = [&](EndpointId e) { return endpoint_label(model, e); };
  auto service = [&](ServiceId s) {
    return s < model.microservices.size() ? model.microservices[s].name : "M_" + std::to_string(s);
  };
  return std::visit(
      [&](const auto& w) -> std::string {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, NircWitness>) {
          return "intraservice call " + label(w.edge.from) + " -> " + label(w.edge.to) + " within " +
                 service(w.parent);
        } else if constexpr (std::is_same_v<W, HubWitness>) {
          return "service " + std::to_string(w.service) + " (" + service(w.service) + ") degree sum " +
                 std::to_string(w.sum) + (w.strict ? " >= " : " > ") + "tau " + std::to_string(w.tau);
        } else if constexpr (std::is_same_v<W, CycleWitness>) {
          std::string s = "cycle";
          for (std::size_t i = 0; i < w.path.size(); ++i) s += (i ? " -> " : " ") + label(w.path[i]);
          return s;
        } else if constexpr (std::is_same_v<W, ChainWitness>) {
          return "role '" + w.role + "' escapes on " + label(w.edge.from) + " -> " + label(w.edge.to);
        } else {
          return "entity " + w.entity + " " + std::string(to_string(w.operation)) + ": role '" + w.role +
                 "' on " + label(w.holder) + " but not on " + label(w.lacking);
        }
      },
      v.witness);
}

ordered_json witness_json(const Witness& witness) {
  return std::visit(
      [](const auto& w) -> ordered_json {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, NircWitness>) {
          return {{"edge", {w.edge.from, w.edge.to}}, {"parent", w.parent}};
        } else if constexpr (std::is_same_v<W, HubWitness>) {
          return {{"service", w.service}, {"sum", w.sum}, {"tau", w.tau}, {"strict", w.strict}};
        } else if constexpr (std::is_same_v<W, CycleWitness>) {
          return {{"path", w.path}};
        } else if constexpr (std::is_same_v<W, ChainWitness>) {
          return {{"edge", {w.edge.from, w.edge.to}}, {"role", w.role}};
        } else {
          return {{"entity", w.entity},
                  {"operation", std::string(to_string(w.operation))},
                  {"role", w.role},
                  {"holder", w.holder},
                  {"lacking", w.lacking}};
        }
      },
      witness);
}

ordered_json change_json(const Change& change) {
  if (const auto* r = std::get_if<RemoveEdge>(&change)) {
    return {{"type", "RemoveEdge"}, {"edge", {r->edge.from, r->edge.to}}};
  }
  if (const auto* a = std::get_if<AddRole>(&change)) {
    return {{"type", "AddRole"}, {"endpoint", a->endpoint}, {"role", a->role}};
  }
  const auto& d = std::get<RemoveRole>(change);
  return {{"type", "RemoveRole"}, {"endpoint", d.endpoint}, {"role", d.role}};
}

// Reading helpers; nlohmann's own type errors are mapped to SchemaError.
template <typename T>
T field(const ordered_json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(std::string("field '") + key + "' has the wrong type");
  }
}

Edge edge_field(const ordered_json& j) {
  const auto pair = field<std::vector<std::size_t>>(j, "edge");
  if (pair.size() != 2) throw SchemaError("edge must have two endpoints");
  return {pair[0], pair[1]};
}

Witness witness_from(ConstraintKind kind, const ordered_json& j) {
  switch (kind) {
    case ConstraintKind::Nirc: return NircWitness{edge_field(j), field<std::size_t>(j, "parent")};
    case ConstraintKind::Hub:
      return HubWitness{field<std::size_t>(j, "service"), field<std::size_t>(j, "sum"),
                        field<std::size_t>(j, "tau"), field<bool>(j, "strict")};
    case ConstraintKind::Cycle: return CycleWitness{field<std::vector<EndpointId>>(j, "path")};
    case ConstraintKind::AuthChain: return ChainWitness{edge_field(j), field<std::string>(j, "role")};
    case ConstraintKind::AuthEntityConsistency: {
      const auto op = operation_from_string(field<std::string>(j, "operation"));
      if (!op) throw SchemaError("unknown operation");
      return ConsistencyWitness{field<std::string>(j, "entity"), *op, field<std::string>(j, "role"),
                                field<std::size_t>(j, "holder"), field<std::size_t>(j, "lacking")};
    }
  }
  throw SchemaError("unknown constraint kind");
}

Change change_from(const ordered_json& j) {
  const auto type = field<std::string>(j, "type");
  if (type == "RemoveEdge") return RemoveEdge{edge_field(j)};
  if (type == "AddRole") return AddRole{field<std::size_t>(j, "endpoint"), field<std::string>(j, "role")};
  if (type == "RemoveRole") return RemoveRole{field<std::size_t>(j, "endpoint"), field<std::string>(j, "role")};
  throw SchemaError("unknown change type '" + type + "'");
}

ordered_json parse(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string render_verdict_text(const SystemModel& model, const Verdict& verdict) {
  std::ostringstream out;
  out << "overall: " << (verdict.overall == Status::Sat ? "SAT" : "UNSAT") << "\n";
  for (Concern concern : {Concern::Architecture, Concern::Authorization}) {
    std::size_t count = 0;
    for (const auto& v : verdict.violations) count += v.concern == concern;
    if (count == 0) continue;
    out << to_string(concern) << ": " << count << " violation" << (count == 1 ? "" : "s") << "\n";
    for (const auto& v : verdict.violations) {
      if (v.concern != concern) continue;
      out << "  [" << to_string(v.kind) << "] " << v.constraint_id << ": " << describe(model, v) << "\n";
    }
  }
  return out.str();
}

std::string render_change(const Change& change) {
  if (const auto* r = std::get_if<RemoveEdge>(&change)) return "remove call " + edge_text(r->edge);
  if (const auto* a = std::get_if<AddRole>(&change)) {
    return "add role '" + a->role + "' to E_" + std::to_string(a->endpoint);
  }
  const auto& d = std::get<RemoveRole>(change);
  return "remove role '" + d.role + "' from E_" + std::to_string(d.endpoint);
}

std::string render_plan_text(const SystemModel& model, const RepairPlan& plan) {
  std::ostringstream out;
  out << "repair plan, cost " << plan.cost << "\n";
  for (const Change& change : plan.changes) {
    out << "  " << render_change(change);
    if (const auto* r = std::get_if<RemoveEdge>(&change)) {
      out << "  (" << endpoint_label(model, r->edge.from) << " -> " << endpoint_label(model, r->edge.to) << ")";
    }
    out << "\n";
  }
  return out.str();
}

std::string verdict_to_json(const Verdict& verdict) {
  ordered_json violations = ordered_json::array();
  for (const auto& v : verdict.violations) {
    violations.push_back({{"constraint_id", v.constraint_id},
                          {"kind", std::string(to_string(v.kind))},
                          {"concern", std::string(to_string(v.concern))},
                          {"witness", witness_json(v.witness)}});
  }
  ordered_json j = {{"overall", verdict.overall == Status::Sat ? "SAT" : "UNSAT"}, {"violations", violations}};
  return j.dump(2) + "\n";
}

std::string plan_to_json(const RepairPlan& plan) {
  ordered_json changes = ordered_json::array();
  for (const Change& c : plan.changes) changes.push_back(change_json(c));
  ordered_json j = {{"changes", changes}, {"cost", plan.cost}};
  return j.dump(2) + "\n";
}

Verdict verdict_from_json(const std::string& text) {
  const ordered_json j = parse(text);
  Verdict verdict;
  const auto overall = field<std::string>(j, "overall");
  if (overall != "SAT" && overall != "UNSAT") throw SchemaError("overall must be SAT or UNSAT");
  verdict.overall = overall == "SAT" ? Status::Sat : Status::Unsat;
  const auto& list = j.contains("violations") ? j.at("violations") : ordered_json();
  if (!list.is_array()) throw SchemaError("violations must be an array");
  for (const auto& item : list) {
    Violation v;
    v.constraint_id = field<std::string>(item, "constraint_id");
    const auto kind = kind_from_string(field<std::string>(item, "kind"));
    const auto concern = concern_from_string(field<std::string>(item, "concern"));
    if (!kind || !concern) throw SchemaError("unknown kind or concern");
    v.kind = *kind;
    v.concern = *concern;
    if (!item.contains("witness")) throw SchemaError("missing field 'witness'");
    v.witness = witness_from(v.kind, item.at("witness"));
    verdict.violations.push_back(std::move(v));
  }
  return verdict;
}

RepairPlan plan_from_json(const std::string& text) {
  const ordered_json j = parse(text);
  RepairPlan plan;
  plan.cost = field<std::size_t>(j, "cost");
  if (!j.contains("changes") || !j.at("changes").is_array()) throw SchemaError("changes must be an array");
  for (const auto& item : j.at("changes")) plan.changes.push_back(change_from(item));
  return plan;
}

}  // namespace msaverify
