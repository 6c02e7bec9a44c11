#include "auctiondyn/jsonschema.hpp"

namespace auctiondyn {

namespace {

using nlohmann::json;

bool type_matches(const json& doc, const std::string& type) {
  if (type == "object") return doc.is_object();
  if (type == "array") return doc.is_array();
  if (type == "string") return doc.is_string();
  if (type == "boolean") return doc.is_boolean();
  if (type == "integer") return doc.is_number_integer() || doc.is_number_unsigned();
  if (type == "number") return doc.is_number();
  if (type == "null") return doc.is_null();
  return false;
}

void check(const json& doc, const json& schema, const std::string& path,
           std::vector<std::string>& errors) {
  if (schema.contains("type")) {
    const json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(doc, t.get<std::string>());
    } else if (t.is_array()) {
      for (const auto& alt : t)
        if (type_matches(doc, alt.get<std::string>())) ok = true;
    }
    if (!ok) {
      errors.push_back(path + ": expected type " + t.dump() + ", got " +
                       std::string(doc.type_name()));
      return;
    }
  }

  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& option : schema["enum"])
      if (doc == option) ok = true;
    if (!ok) errors.push_back(path + ": value " + doc.dump() + " not in enum");
  }

  if (doc.is_number()) {
    double x = doc.get<double>();
    if (schema.contains("minimum") && x < schema["minimum"].get<double>())
      errors.push_back(path + ": " + doc.dump() + " below minimum");
    if (schema.contains("exclusiveMinimum") && x <= schema["exclusiveMinimum"].get<double>())
      errors.push_back(path + ": " + doc.dump() + " not above exclusiveMinimum");
  }

  if (doc.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"])
        if (!doc.contains(key.get<std::string>()))
          errors.push_back(path + ": missing required key '" + key.get<std::string>() + "'");
    }
    if (schema.contains("properties")) {
      for (const auto& [key, sub] : schema["properties"].items())
        if (doc.contains(key)) check(doc[key], sub, path + "/" + key, errors);
    }
  }

  if (doc.is_array()) {
    if (schema.contains("minItems") && doc.size() < schema["minItems"].get<std::size_t>())
      errors.push_back(path + ": fewer than minItems elements");
    if (schema.contains("items")) {
      std::size_t i = 0;
      for (const auto& element : doc) {
        check(element, schema["items"], path + "/" + std::to_string(i), errors);
        ++i;
      }
    }
  }
}

}  // namespace

std::vector<std::string> validate_schema(const nlohmann::json& document,
                                         const nlohmann::json& schema) {
  std::vector<std::string> errors;
  check(document, schema, "", errors);
  return errors;
}

}  // namespace auctiondyn
