#include "oracles.hpp"

#include <functional>

namespace oracle {

using msaverify::Edge;
using msaverify::SystemModel;

bool has_cycle(std::size_t m, const std::set<Edge>& edges) {
  std::vector<std::vector<std::size_t>> out(m);
  for (const Edge& e : edges) out[e.from].push_back(e.to);
  std::vector<int> colour(m, 0);
  std::function<bool(std::size_t)> dfs = [&](std::size_t v) {
    colour[v] = 1;
    for (std::size_t w : out[v]) {
      if (colour[w] == 1) return true;
      if (colour[w] == 0 && dfs(w)) return true;
    }
    colour[v] = 2;
    return false;
  };
  for (std::size_t v = 0; v < m; ++v) {
    if (colour[v] == 0 && dfs(v)) return true;
  }
  return false;
}

std::vector<Edge> intraservice_edges(const SystemModel& model) {
  std::vector<Edge> out;
  for (const Edge& e : model.edges) {
    if (model.endpoints[e.from].parent == model.endpoints[e.to].parent) out.push_back(e);
  }
  return out;
}

std::vector<std::size_t> degree_sums(const SystemModel& model) {
  std::vector<std::size_t> sums(model.microservices.size(), 0);
  for (const Edge& e : model.edges) {
    ++sums[model.endpoints[e.from].parent];
    ++sums[model.endpoints[e.to].parent];
  }
  return sums;
}

bool labels_respect_edges(const std::vector<long long>& labels, const std::set<Edge>& edges) {
  for (const Edge& e : edges) {
    if (e.from >= labels.size() || e.to >= labels.size() || !(labels[e.from] < labels[e.to])) return false;
  }
  return true;
}

SystemModel random_model(std::mt19937_64& rng, const RandomShape& shape) {
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  SystemModel model;
  const std::size_t n = pick(1, shape.max_services);
  const std::size_t m = pick(n, std::max(n, shape.max_endpoints));
  for (std::size_t s = 0; s < n; ++s) model.microservices.push_back({"s" + std::to_string(s), {}});
  for (std::size_t e = 0; e < m; ++e) {
    // Every service gets at least one endpoint.
    const std::size_t parent = e < n ? e : pick(0, n - 1);
    model.endpoints.push_back({e, "GET", "/e" + std::to_string(e), parent, std::nullopt});
    model.microservices[parent].endpoint_indices.insert(e);
  }
  const double density = std::uniform_real_distribution<double>(0.0, 3.0)(rng) / static_cast<double>(m);
  std::bernoulli_distribution coin(std::min(1.0, density));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (coin(rng)) model.edges.insert({i, j});
    }
  }
  if (shape.max_edges) {
    while (model.edges.size() > shape.max_edges) {
      auto it = model.edges.begin();
      std::advance(it, pick(0, model.edges.size() - 1));
      model.edges.erase(it);
    }
  }
  if (shape.with_auth) {
    msaverify::AuthExtension auth;
    for (std::size_t r = 0; r < shape.n_roles; ++r) auth.roles.insert("r" + std::to_string(r));
    auth.entities = {"doc"};
    for (auto& endpoint : model.endpoints) {
      std::set<std::string> roles;
      for (const auto& role : auth.roles) {
        if (pick(0, 1)) roles.insert(role);
      }
      endpoint.permitted_roles = roles;
      if (pick(0, 2) == 0) {
        auth.accesses.push_back({endpoint.index, "doc", {pick(0, 1) ? msaverify::Operation::Read
                                                                   : msaverify::Operation::Update}});
      }
    }
    model.auth = auth;
  }
  return model;
}

}  // namespace oracle
