// config.hpp — run-configuration schema, validation and canonical normalization

#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace bilayer::config {

using json = nlohmann::json;

/// The published run-configuration schema (embedded at build time).
const std::string& schema_text();
const json& schema();

/// Validates an instance against the supported schema subset: type, enum,
/// properties, required, additionalProperties (false), items, minimum, maximum,
/// exclusiveMinimum, exclusiveMaximum, minLength. Messages start with the JSON
/// pointer of the offending value.
std::vector<std::string> validate(const json& instance, const json& schema);

/// Fills defaults from the schema (recursively, for present or defaulted objects).
json fill_defaults(const json& instance, const json& schema);

/// Defaults + validation; throws ConfigError("schema_violation") listing every path.
json normalize(const json& instance);

/// Reads and parses a JSON file; ConfigError on missing file or bad syntax.
json load_file(const std::string& path);

/// Canonical echo: sorted keys, two-space indentation, trailing newline.
std::string canonical(const json& j);

} // namespace bilayer::config
