#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "msaverify/model.hpp"

namespace msaverify {

/// Strict JSON model reader (schema version 1, see docs/schema.md).
/// Throws ParseError on malformed JSON, SchemaError on shape mismatches and
/// ModelError when the decoded model fails validation.
SystemModel parse_model_file(std::string_view text);

/// Canonical JSON form: fixed key order, endpoints in index order, edges and
/// accesses sorted. Throws ModelError for invalid models.
std::string serialize_model(const SystemModel& model);

/// Reads the `.msa` system-description language. Endpoint indices follow
/// declaration order. Throws ParseError (syntax) or ReferenceError (unknown
/// endpoint/entity), then ModelError if the result fails validation.
SystemModel parse_dsl(std::string_view text);

/// Renders a model as `.msa` source that parse_dsl reads back unchanged.
std::string render_dsl(const SystemModel& model);

/// Loads a file, choosing DSL for `.msa` and JSON otherwise.
SystemModel load_model(const std::string& path);

struct GeneratorParams {
  std::size_t n_services = 1;
  std::size_t min_endpoints = 1;
  std::size_t max_endpoints = 1;
  double edge_density = 0.0;
  bool acyclic = false;
  bool with_auth = false;
  std::size_t n_roles = 3;
  std::size_t n_entities = 2;
  std::uint64_t seed = 0;
};

/// Throws ConfigError when params are out of range.
void check_params(const GeneratorParams& params);

/// Deterministic synthetic system. Randomness comes from std::mt19937_64
/// with hand-written range reduction so output is identical across
/// platforms (algorithm documented in docs/schema.md).
SystemModel generate_synthetic(const GeneratorParams& params);

}  // namespace msaverify
