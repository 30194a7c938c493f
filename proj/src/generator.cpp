// Synthetic system generator.
//
// Random source: std::mt19937_64 seeded with `seed`. Range reduction is done
// here instead of through <random> distributions, whose algorithms are
// implementation-defined:
//   uniform01()   = (next() >> 11) * 2^-53
//   below(bound)  = rejection sampling on next() against the largest
//                   multiple of bound, then modulo
// Edges are drawn by geometric skipping over an ordered candidate list, which
// is equivalent to an independent Bernoulli(density) trial per candidate.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "msaverify/error.hpp"
#include "msaverify/ingest.hpp"

namespace msaverify {

namespace {

class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

  // Number of failures before the next success of a Bernoulli(p) trial.
  std::uint64_t geometric_skip(double p) {
    if (p >= 1.0) return 0;
    const double u = 1.0 - uniform01();  // (0, 1]
    const double skip = std::floor(std::log(u) / std::log1p(-p));
    if (skip >= 9.0e18) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(skip);
  }

 private:
  std::mt19937_64 engine_;
};

constexpr const char* kResources[] = {"orders", "users", "items", "routes", "prices",
                                      "stations", "tickets", "configs"};

// Zipf-like role draw: weight of role r is 1 / (r + 1), so high-numbered
// roles are rare.
std::size_t draw_role(PortableRng& rng, std::size_t n_roles) {
  double total = 0.0;
  for (std::size_t r = 0; r < n_roles; ++r) total += 1.0 / static_cast<double>(r + 1);
  double target = rng.uniform01() * total;
  for (std::size_t r = 0; r < n_roles; ++r) {
    target -= 1.0 / static_cast<double>(r + 1);
    if (target < 0.0) return r;
  }
  return n_roles - 1;
}

}  // namespace

void check_params(const GeneratorParams& params) {
  if (params.n_services == 0) throw ConfigError("n_services must be positive");
  if (params.min_endpoints == 0) throw ConfigError("endpoints per service must be positive");
  if (params.min_endpoints > params.max_endpoints) {
    throw ConfigError("endpoint range min exceeds max");
  }
  if (!(params.edge_density >= 0.0 && params.edge_density <= 1.0)) {
    throw ConfigError("edge density must lie in [0, 1]");
  }
  if (params.with_auth && (params.n_roles == 0 || params.n_entities == 0)) {
    throw ConfigError("with_auth needs at least one role and one entity");
  }
}

SystemModel generate_synthetic(const GeneratorParams& params) {
  check_params(params);
  PortableRng rng(params.seed);
  SystemModel model;

  const std::size_t span = params.max_endpoints - params.min_endpoints + 1;
  for (std::size_t s = 0; s < params.n_services; ++s) {
    Microservice service;
    service.name = "svc-" + std::to_string(s);
    const std::size_t count = params.min_endpoints + rng.below(span);
    for (std::size_t k = 0; k < count; ++k) {
      Endpoint endpoint;
      endpoint.index = model.endpoints.size();
      endpoint.method = std::string(kHttpMethods[rng.below(std::size(kHttpMethods))]);
      endpoint.path = "/svc" + std::to_string(s) + "/" + kResources[rng.below(std::size(kResources))] +
                      "/" + std::to_string(k);
      endpoint.parent = s;
      service.endpoint_indices.insert(endpoint.index);
      model.endpoints.push_back(std::move(endpoint));
    }
    model.microservices.push_back(std::move(service));
  }

  const std::size_t m = model.endpoints.size();

  // Candidate order: all ordered pairs (i, j) by linear index i*m + j, or,
  // when acyclic, pairs (perm[a], perm[b]) with a < b in row-major triangle
  // order. Same-service pairs are filtered after the Bernoulli trial.
  std::vector<EndpointId> perm(m);
  for (std::size_t i = 0; i < m; ++i) perm[i] = i;
  if (params.acyclic) {
    for (std::size_t i = m; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  }

  if (params.edge_density > 0.0 && m > 1) {
    auto parent = [&](EndpointId e) { return model.endpoints[e].parent; };
    if (!params.acyclic) {
      const std::uint64_t total = static_cast<std::uint64_t>(m) * m;
      std::uint64_t index = rng.geometric_skip(params.edge_density);
      while (index < total) {
        const EndpointId i = index / m;
        const EndpointId j = index % m;
        if (parent(i) != parent(j)) model.edges.insert({i, j});
        const std::uint64_t skip = rng.geometric_skip(params.edge_density);
        if (skip >= total - index) break;
        index += skip + 1;
      }
    } else {
      // Walk row a of the triangle, columns a+1..m-1.
      std::uint64_t pending = rng.geometric_skip(params.edge_density);
      for (std::size_t a = 0; a + 1 < m; ++a) {
        std::uint64_t row = m - a - 1;
        std::size_t b = a + 1;
        while (pending < row) {
          b += pending;
          row -= pending;
          const EndpointId i = perm[a];
          const EndpointId j = perm[b];
          if (parent(i) != parent(j)) model.edges.insert({i, j});
          ++b;
          --row;
          pending = rng.geometric_skip(params.edge_density);
        }
        pending -= row;
      }
    }
  }

  if (params.with_auth) {
    AuthExtension auth;
    for (std::size_t r = 0; r < params.n_roles; ++r) auth.roles.insert("role" + std::to_string(r));
    for (std::size_t d = 0; d < params.n_entities; ++d) auth.entities.insert("entity" + std::to_string(d));
    const std::size_t max_roles = std::min<std::size_t>(params.n_roles, 3);
    for (auto& endpoint : model.endpoints) {
      const std::size_t want = 1 + rng.below(max_roles);
      std::set<std::string> roles;
      for (std::size_t attempt = 0; roles.size() < want && attempt < 8 * want; ++attempt) {
        roles.insert("role" + std::to_string(draw_role(rng, params.n_roles)));
      }
      endpoint.permitted_roles = std::move(roles);
    }
    for (const auto& endpoint : model.endpoints) {
      if (rng.uniform01() >= 0.3) continue;
      EntityAccess access;
      access.endpoint = endpoint.index;
      access.entity = "entity" + std::to_string(rng.below(params.n_entities));
      const std::uint64_t mask = 1 + rng.below(15);
      for (std::size_t bit = 0; bit < 4; ++bit) {
        if (mask & (1u << bit)) access.operations.insert(kAllOperations[bit]);
      }
      auth.accesses.push_back(std::move(access));
    }
    model.auth = std::move(auth);
  }
  return model;
}

}  // namespace msaverify
