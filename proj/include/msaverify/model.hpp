#pragma once

// Intermediate model of a microservice system: services, endpoints, the
// endpoint call graph and the optional authorization extension, plus the
// integer encoding consumed by constraint generation.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace msaverify {

using EndpointId = std::size_t;
using ServiceId = std::size_t;

/// Directed call from `from` to `to`; ordered lexicographically.
struct Edge {
  EndpointId from = 0;
  EndpointId to = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class Operation : std::uint8_t { Create, Read, Update, Delete };

inline constexpr Operation kAllOperations[] = {Operation::Create, Operation::Read,
                                               Operation::Update, Operation::Delete};

std::string_view to_string(Operation op);
std::optional<Operation> operation_from_string(std::string_view text);

/// HTTP verbs accepted as endpoint methods.
inline constexpr std::string_view kHttpMethods[] = {"GET", "POST", "PUT", "DELETE", "PATCH"};
bool is_http_method(std::string_view token);

struct Microservice {
  std::string name;
  std::set<EndpointId> endpoint_indices;

  friend bool operator==(const Microservice&, const Microservice&) = default;
};

struct Endpoint {
  EndpointId index = 0;
  std::string method;
  std::string path;
  ServiceId parent = 0;
  std::optional<std::set<std::string>> permitted_roles;

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

struct EntityAccess {
  EndpointId endpoint = 0;
  std::string entity;
  std::set<Operation> operations;

  friend auto operator<=>(const EntityAccess&, const EntityAccess&) = default;
};

struct AuthExtension {
  std::set<std::string> roles;
  std::set<std::string> entities;
  std::vector<EntityAccess> accesses;

  /// Position of `role` in the sorted role set, if declared.
  std::optional<std::size_t> role_index(std::string_view role) const;

  // Access order is not significant.
  friend bool operator==(const AuthExtension& a, const AuthExtension& b);
};

struct SystemModel {
  static constexpr int kFormatVersion = 1;

  int version = kFormatVersion;
  std::vector<Microservice> microservices;
  std::vector<Endpoint> endpoints;
  std::set<Edge> edges;
  std::optional<AuthExtension> auth;

  friend bool operator==(const SystemModel&, const SystemModel&) = default;
};

struct ValidationIssue {
  std::string invariant;  // short stable code, e.g. "parent-out-of-range"
  std::string message;    // names the offending element
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const noexcept { return issues.empty(); }
  std::string summary() const;
};

ValidationReport validate_model(const SystemModel& model);

/// Integer encoding of a validated model: parent array plus call graph.
///
/// Adjacency is kept as a sorted edge list with CSR successor/predecessor
/// indexes. Up to kDenseThreshold endpoints a dense m x m matrix is also
/// materialized; above it `dense_matrix()` builds one on request.
class CanonicalModel {
 public:
  static constexpr std::size_t kDenseThreshold = 512;

  CanonicalModel() = default;
  CanonicalModel(std::size_t service_count, std::vector<ServiceId> e_parents,
                 std::vector<Edge> sorted_edges);

  std::size_t m() const noexcept { return e_parents_.size(); }
  std::size_t n() const noexcept { return service_count_; }

  std::span<const ServiceId> e_parents() const noexcept { return e_parents_; }
  ServiceId parent(EndpointId e) const { return e_parents_.at(e); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  bool has_edge(EndpointId from, EndpointId to) const;
  std::span<const EndpointId> successors(EndpointId e) const;
  std::span<const EndpointId> predecessors(EndpointId e) const;
  /// Position in edges() of the first outgoing edge of `e`; successor k of
  /// `e` is edges()[out_edge_begin(e) + k].
  std::size_t out_edge_begin(EndpointId e) const { return out_offsets_.at(e); }
  /// Position of `edge` in edges(), if present.
  std::optional<std::size_t> edge_position(const Edge& edge) const;

  bool has_dense_view() const noexcept { return !dense_.empty() || m() == 0; }
  std::vector<std::vector<bool>> dense_matrix() const;

  friend bool operator==(const CanonicalModel&, const CanonicalModel&) = default;

 private:
  std::size_t service_count_ = 0;
  std::vector<ServiceId> e_parents_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<EndpointId> out_targets_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<EndpointId> in_sources_;
  std::vector<bool> dense_;  // row-major, empty when m > kDenseThreshold
};

/// Throws ModelError when `model` fails validation.
CanonicalModel canonicalize(const SystemModel& model);

/// Inbound plus outbound edges touching any endpoint of `service`. An edge
/// with both ends inside the service (including a self-loop) counts twice.
std::size_t service_degree_sum(const CanonicalModel& canon, ServiceId service);

/// All degree sums in one pass over the edges.
std::vector<std::size_t> service_degree_sums(const CanonicalModel& canon);

/// Endpoint lookup by (method, path).
std::optional<EndpointId> find_endpoint(const SystemModel& model, std::string_view method,
                                        std::string_view path);

std::string endpoint_label(const SystemModel& model, EndpointId e);

}  // namespace msaverify
