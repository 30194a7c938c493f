#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "msaverify/error.hpp"
#include "msaverify/ingest.hpp"

namespace msaverify {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

// Schema helpers. `where` is a JSON-pointer-ish location used in messages.

const json& require(const json& object, const char* key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) throw SchemaError(where + ": missing field '" + key + "'");
  return *it;
}

void reject_unknown(const json& object, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& [key, _] : object.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw SchemaError(where + ": unknown field '" + key + "'");
    }
  }
}

const json& as_object(const json& value, const std::string& where) {
  if (!value.is_object()) throw SchemaError(where + ": expected object");
  return value;
}

const json& as_array(const json& value, const std::string& where) {
  if (!value.is_array()) throw SchemaError(where + ": expected array");
  return value;
}

std::size_t as_index(const json& value, const std::string& where) {
  if (!value.is_number_unsigned()) throw SchemaError(where + ": expected non-negative integer");
  return value.get<std::size_t>();
}

std::string as_string(const json& value, const std::string& where) {
  if (!value.is_string()) throw SchemaError(where + ": expected string");
  return value.get<std::string>();
}

std::set<std::string> as_string_set(const json& value, const std::string& where) {
  std::set<std::string> out;
  std::size_t i = 0;
  for (const auto& item : as_array(value, where)) {
    const std::string at = where + "[" + std::to_string(i++) + "]";
    if (!out.insert(as_string(item, at)).second) throw SchemaError(at + ": duplicate entry");
  }
  return out;
}

AuthExtension read_auth(const json& value) {
  const std::string where = "/auth";
  as_object(value, where);
  reject_unknown(value, {"roles", "entities", "accesses"}, where);
  AuthExtension auth;
  auth.roles = as_string_set(require(value, "roles", where), where + "/roles");
  auth.entities = as_string_set(require(value, "entities", where), where + "/entities");
  std::size_t i = 0;
  for (const auto& item : as_array(require(value, "accesses", where), where + "/accesses")) {
    const std::string at = where + "/accesses[" + std::to_string(i++) + "]";
    as_object(item, at);
    reject_unknown(item, {"endpoint", "entity", "operations"}, at);
    EntityAccess access;
    access.endpoint = as_index(require(item, "endpoint", at), at + "/endpoint");
    access.entity = as_string(require(item, "entity", at), at + "/entity");
    for (const auto& name : as_string_set(require(item, "operations", at), at + "/operations")) {
      auto op = operation_from_string(name);
      if (!op) throw SchemaError(at + "/operations: unknown operation '" + name + "'");
      access.operations.insert(*op);
    }
    auth.accesses.push_back(std::move(access));
  }
  std::sort(auth.accesses.begin(), auth.accesses.end());
  return auth;
}

}  // namespace

SystemModel parse_model_file(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(std::string("malformed JSON: ") + e.what(), line, column);
  }

  as_object(doc, "/");
  reject_unknown(doc, {"version", "microservices", "endpoints", "edges", "auth"}, "/");

  const json& version = require(doc, "version", "/");
  if (!version.is_number_integer()) throw SchemaError("/version: expected integer");
  if (version.get<long long>() != SystemModel::kFormatVersion) {
    throw SchemaError("/version: unsupported version " + version.dump());
  }

  SystemModel model;
  std::size_t i = 0;
  for (const auto& item : as_array(require(doc, "microservices", "/"), "/microservices")) {
    const std::string at = "/microservices[" + std::to_string(i++) + "]";
    as_object(item, at);
    reject_unknown(item, {"name", "endpoints"}, at);
    Microservice service;
    service.name = as_string(require(item, "name", at), at + "/name");
    std::size_t k = 0;
    for (const auto& e : as_array(require(item, "endpoints", at), at + "/endpoints")) {
      const std::string eat = at + "/endpoints[" + std::to_string(k++) + "]";
      if (!service.endpoint_indices.insert(as_index(e, eat)).second) {
        throw SchemaError(eat + ": duplicate entry");
      }
    }
    model.microservices.push_back(std::move(service));
  }

  i = 0;
  for (const auto& item : as_array(require(doc, "endpoints", "/"), "/endpoints")) {
    const std::string at = "/endpoints[" + std::to_string(i++) + "]";
    as_object(item, at);
    reject_unknown(item, {"index", "method", "path", "parent", "roles"}, at);
    Endpoint endpoint;
    endpoint.index = as_index(require(item, "index", at), at + "/index");
    endpoint.method = as_string(require(item, "method", at), at + "/method");
    endpoint.path = as_string(require(item, "path", at), at + "/path");
    endpoint.parent = as_index(require(item, "parent", at), at + "/parent");
    if (auto roles = item.find("roles"); roles != item.end()) {
      endpoint.permitted_roles = as_string_set(*roles, at + "/roles");
    }
    model.endpoints.push_back(std::move(endpoint));
  }

  i = 0;
  for (const auto& item : as_array(require(doc, "edges", "/"), "/edges")) {
    const std::string at = "/edges[" + std::to_string(i++) + "]";
    if (!item.is_array() || item.size() != 2) throw SchemaError(at + ": expected [from, to]");
    Edge edge{as_index(item[0], at + "[0]"), as_index(item[1], at + "[1]")};
    if (!model.edges.insert(edge).second) throw SchemaError(at + ": duplicate edge");
  }

  if (auto auth = doc.find("auth"); auth != doc.end()) model.auth = read_auth(*auth);

  if (auto report = validate_model(model); !report.ok()) {
    throw ModelError("invalid model: " + report.summary());
  }
  return model;
}

std::string serialize_model(const SystemModel& model) {
  if (auto report = validate_model(model); !report.ok()) {
    throw ModelError("cannot serialize invalid model: " + report.summary());
  }

  std::ostringstream out;
  auto write_list = [&out](const char* key, const std::vector<ordered_json>& items, bool last) {
    out << "  \"" << key << "\": [";
    for (std::size_t i = 0; i < items.size(); ++i) {
      out << (i ? ",\n    " : "\n    ") << items[i].dump();
    }
    out << (items.empty() ? "]" : "\n  ]") << (last ? "\n" : ",\n");
  };

  out << "{\n  \"version\": " << model.version << ",\n";

  std::vector<ordered_json> services;
  for (const auto& service : model.microservices) {
    ordered_json item;
    item["name"] = service.name;
    item["endpoints"] = service.endpoint_indices;
    services.push_back(std::move(item));
  }
  write_list("microservices", services, false);

  std::vector<ordered_json> endpoints;
  for (const auto& endpoint : model.endpoints) {
    ordered_json item;
    item["index"] = endpoint.index;
    item["method"] = endpoint.method;
    item["path"] = endpoint.path;
    item["parent"] = endpoint.parent;
    if (endpoint.permitted_roles) item["roles"] = *endpoint.permitted_roles;
    endpoints.push_back(std::move(item));
  }
  write_list("endpoints", endpoints, false);

  std::vector<ordered_json> edges;
  for (const Edge& edge : model.edges) edges.push_back(ordered_json::array({edge.from, edge.to}));
  write_list("edges", edges, !model.auth.has_value());

  if (model.auth) {
    const auto& auth = *model.auth;
    out << "  \"auth\": {\n";
    out << "    \"roles\": " << ordered_json(auth.roles).dump() << ",\n";
    out << "    \"entities\": " << ordered_json(auth.entities).dump() << ",\n";
    auto accesses = auth.accesses;
    std::sort(accesses.begin(), accesses.end());
    out << "    \"accesses\": [";
    for (std::size_t i = 0; i < accesses.size(); ++i) {
      ordered_json item;
      item["endpoint"] = accesses[i].endpoint;
      item["entity"] = accesses[i].entity;
      item["operations"] = ordered_json::array();
      for (Operation op : accesses[i].operations) item["operations"].push_back(std::string(to_string(op)));
      out << (i ? ",\n      " : "\n      ") << item.dump();
    }
    out << (accesses.empty() ? "]" : "\n    ]") << "\n  }\n";
  }
  out << "}\n";
  return out.str();
}

SystemModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const bool is_dsl = path.size() >= 4 && path.compare(path.size() - 4, 4, ".msa") == 0;
  return is_dsl ? parse_dsl(buffer.str()) : parse_model_file(buffer.str());
}

}  // namespace msaverify
