#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace auctiondyn {

/// Validates a document against the JSON-Schema subset used by the shipped
/// schemas: type, properties, required, items, enum, minimum,
/// exclusiveMinimum, minItems. Returns one message per violation; empty
/// means the document conforms.
std::vector<std::string> validate_schema(const nlohmann::json& document,
                                         const nlohmann::json& schema);

}  // namespace auctiondyn
