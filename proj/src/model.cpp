#include "msaverify/model.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "msaverify/error.hpp"

namespace msaverify {

std::string_view to_string(Operation op) {
  switch (op) {
    case Operation::Create: return "CREATE";
    case Operation::Read: return "READ";
    case Operation::Update: return "UPDATE";
    case Operation::Delete: return "DELETE";
  }
  return "?";
}

std::optional<Operation> operation_from_string(std::string_view text) {
  for (Operation op : kAllOperations) {
    if (to_string(op) == text) return op;
  }
  return std::nullopt;
}

bool is_http_method(std::string_view token) {
  return std::find(std::begin(kHttpMethods), std::end(kHttpMethods), token) !=
         std::end(kHttpMethods);
}

std::optional<std::size_t> AuthExtension::role_index(std::string_view role) const {
  auto it = roles.find(std::string(role));
  if (it == roles.end()) return std::nullopt;
  return static_cast<std::size_t>(std::distance(roles.begin(), it));
}

bool operator==(const AuthExtension& a, const AuthExtension& b) {
  if (a.roles != b.roles || a.entities != b.entities) return false;
  if (a.accesses.size() != b.accesses.size()) return false;
  auto lhs = a.accesses;
  auto rhs = b.accesses;
  std::sort(lhs.begin(), lhs.end());
  std::sort(rhs.begin(), rhs.end());
  return lhs == rhs;
}

std::string ValidationReport::summary() const {
  if (ok()) return "OK";
  std::ostringstream out;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) out << "; ";
    out << issues[i].invariant << ": " << issues[i].message;
  }
  return out.str();
}

namespace {

class IssueSink {
 public:
  void add(std::string invariant, std::string message) {
    report_.issues.push_back({std::move(invariant), std::move(message)});
  }
  ValidationReport take() { return std::move(report_); }

 private:
  ValidationReport report_;
};

std::string ep(std::size_t i) { return "endpoint " + std::to_string(i); }

void validate_auth(const SystemModel& model, IssueSink& sink) {
  const auto& auth = *model.auth;
  const std::size_t m = model.endpoints.size();

  for (const auto& endpoint : model.endpoints) {
    if (!endpoint.permitted_roles) {
      sink.add("auth-partial", ep(endpoint.index) + " has no permitted roles but the model declares an auth extension");
      continue;
    }
    for (const auto& role : *endpoint.permitted_roles) {
      if (!auth.roles.contains(role)) {
        sink.add("undeclared-role", ep(endpoint.index) + " permits undeclared role '" + role + "'");
      }
    }
  }

  std::set<std::pair<EndpointId, std::string>> seen;
  for (const auto& access : auth.accesses) {
    if (access.endpoint >= m) {
      sink.add("access-endpoint-out-of-range",
               "access to '" + access.entity + "' references " + ep(access.endpoint));
    }
    if (!auth.entities.contains(access.entity)) {
      sink.add("undeclared-entity", ep(access.endpoint) + " accesses undeclared entity '" + access.entity + "'");
    }
    if (access.operations.empty()) {
      sink.add("empty-operations", ep(access.endpoint) + " accesses '" + access.entity + "' with no operations");
    }
    if (!seen.emplace(access.endpoint, access.entity).second) {
      sink.add("duplicate-access", ep(access.endpoint) + " has more than one access to '" + access.entity + "'");
    }
  }
}

}  // namespace

ValidationReport validate_model(const SystemModel& model) {
  IssueSink sink;
  const std::size_t n = model.microservices.size();
  const std::size_t m = model.endpoints.size();

  if (model.version != SystemModel::kFormatVersion) {
    sink.add("unsupported-version", "version " + std::to_string(model.version));
  }

  std::set<std::string> names;
  for (std::size_t s = 0; s < n; ++s) {
    const auto& service = model.microservices[s];
    if (service.name.empty()) sink.add("empty-service-name", "service " + std::to_string(s));
    if (!names.insert(service.name).second) {
      sink.add("duplicate-service-name", "'" + service.name + "'");
    }
    for (EndpointId e : service.endpoint_indices) {
      if (e >= m) {
        sink.add("service-endpoint-out-of-range", "service '" + service.name + "' lists " + ep(e));
      } else if (model.endpoints[e].parent != s) {
        sink.add("parent-mismatch", "service '" + service.name + "' lists " + ep(e) +
                                        " whose parent is " + std::to_string(model.endpoints[e].parent));
      }
    }
  }

  std::set<std::pair<std::string, std::string>> routes;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& endpoint = model.endpoints[i];
    if (endpoint.index != i) {
      sink.add("index-mismatch", "endpoint at position " + std::to_string(i) + " carries index " +
                                     std::to_string(endpoint.index));
    }
    if (!is_http_method(endpoint.method)) {
      sink.add("bad-method", ep(i) + " has method '" + endpoint.method + "'");
    }
    if (endpoint.path.empty()) sink.add("empty-path", ep(i));
    if (!routes.emplace(endpoint.method, endpoint.path).second) {
      sink.add("duplicate-route", endpoint.method + " " + endpoint.path);
    }
    if (endpoint.parent >= n) {
      sink.add("parent-out-of-range", ep(i) + " has parent " + std::to_string(endpoint.parent) +
                                          " but the model has " + std::to_string(n) + " services");
    } else if (!model.microservices[endpoint.parent].endpoint_indices.contains(i)) {
      sink.add("unlisted-endpoint", ep(i) + " is not listed by its parent '" +
                                        model.microservices[endpoint.parent].name + "'");
    }
    if (!model.auth && endpoint.permitted_roles) {
      sink.add("auth-partial", ep(i) + " has permitted roles but the model has no auth extension");
    }
  }

  for (const Edge& edge : model.edges) {
    if (edge.from >= m || edge.to >= m) {
      sink.add("edge-out-of-range",
               "edge (" + std::to_string(edge.from) + "," + std::to_string(edge.to) + ")");
    }
  }

  if (model.auth) validate_auth(model, sink);
  return sink.take();
}

CanonicalModel::CanonicalModel(std::size_t service_count, std::vector<ServiceId> e_parents,
                               std::vector<Edge> sorted_edges)
    : service_count_(service_count), e_parents_(std::move(e_parents)), edges_(std::move(sorted_edges)) {
  const std::size_t count = m();
  out_offsets_.assign(count + 1, 0);
  in_offsets_.assign(count + 1, 0);
  for (const Edge& edge : edges_) {
    ++out_offsets_[edge.from + 1];
    ++in_offsets_[edge.to + 1];
  }
  for (std::size_t i = 0; i < count; ++i) {
    out_offsets_[i + 1] += out_offsets_[i];
    in_offsets_[i + 1] += in_offsets_[i];
  }
  out_targets_.resize(edges_.size());
  in_sources_.resize(edges_.size());
  std::vector<std::size_t> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
  std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
  // Edges are sorted, so both indexes come out sorted per endpoint.
  for (const Edge& edge : edges_) {
    out_targets_[out_fill[edge.from]++] = edge.to;
    in_sources_[in_fill[edge.to]++] = edge.from;
  }
  if (count > 0 && count <= kDenseThreshold) {
    dense_.assign(count * count, false);
    for (const Edge& edge : edges_) dense_[edge.from * count + edge.to] = true;
  }
}

bool CanonicalModel::has_edge(EndpointId from, EndpointId to) const {
  if (from >= m() || to >= m()) return false;
  if (!dense_.empty()) return dense_[from * m() + to];
  auto row = successors(from);
  return std::binary_search(row.begin(), row.end(), to);
}

std::optional<std::size_t> CanonicalModel::edge_position(const Edge& edge) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), edge);
  if (it == edges_.end() || *it != edge) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

std::span<const EndpointId> CanonicalModel::successors(EndpointId e) const {
  return std::span<const EndpointId>(out_targets_).subspan(out_offsets_.at(e),
                                                           out_offsets_.at(e + 1) - out_offsets_[e]);
}

std::span<const EndpointId> CanonicalModel::predecessors(EndpointId e) const {
  return std::span<const EndpointId>(in_sources_).subspan(in_offsets_.at(e),
                                                          in_offsets_.at(e + 1) - in_offsets_[e]);
}

std::vector<std::vector<bool>> CanonicalModel::dense_matrix() const {
  std::vector<std::vector<bool>> matrix(m(), std::vector<bool>(m(), false));
  for (const Edge& edge : edges_) matrix[edge.from][edge.to] = true;
  return matrix;
}

CanonicalModel canonicalize(const SystemModel& model) {
  if (auto report = validate_model(model); !report.ok()) {
    throw ModelError("cannot canonicalize invalid model: " + report.summary());
  }
  std::vector<ServiceId> parents;
  parents.reserve(model.endpoints.size());
  for (const auto& endpoint : model.endpoints) parents.push_back(endpoint.parent);
  return CanonicalModel(model.microservices.size(), std::move(parents),
                        std::vector<Edge>(model.edges.begin(), model.edges.end()));
}

std::size_t service_degree_sum(const CanonicalModel& canon, ServiceId service) {
  if (service >= canon.n()) {
    throw std::out_of_range("service index " + std::to_string(service) + " out of range");
  }
  std::size_t sum = 0;
  for (const Edge& edge : canon.edges()) {
    if (canon.parent(edge.from) == service) ++sum;
    if (canon.parent(edge.to) == service) ++sum;
  }
  return sum;
}

std::vector<std::size_t> service_degree_sums(const CanonicalModel& canon) {
  std::vector<std::size_t> sums(canon.n(), 0);
  for (const Edge& edge : canon.edges()) {
    ++sums[canon.parent(edge.from)];
    ++sums[canon.parent(edge.to)];
  }
  return sums;
}

std::optional<EndpointId> find_endpoint(const SystemModel& model, std::string_view method,
                                        std::string_view path) {
  for (const auto& endpoint : model.endpoints) {
    if (endpoint.method == method && endpoint.path == path) return endpoint.index;
  }
  return std::nullopt;
}

std::string endpoint_label(const SystemModel& model, EndpointId e) {
  std::string label = "E_" + std::to_string(e);
  if (e < model.endpoints.size()) {
    label += " (" + model.endpoints[e].method + " " + model.endpoints[e].path + ")";
  }
  return label;
}

}  // namespace msaverify
