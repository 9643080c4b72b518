#pragma once

// Minimal structural validator for the shipped draft-07 schemas: handles
// type, required, properties, items, and enum, which is all they use.

#include <json.hpp>
#include <string>

namespace testsup {

inline bool type_matches(const nlohmann::json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "integer") return value.is_number_integer();
  if (type == "number") return value.is_number();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  return false;
}

inline void check_schema(const nlohmann::json& value,
                         const nlohmann::json& schema, std::string path,
                         std::string* error) {
  if (!error->empty()) return;
  if (schema.contains("type")) {
    const auto& type = schema["type"];
    bool ok = false;
    if (type.is_string()) {
      ok = type_matches(value, type.get<std::string>());
    } else {
      for (const auto& t : type)
        ok = ok || type_matches(value, t.get<std::string>());
    }
    if (!ok) {
      *error = path + ": type mismatch";
      return;
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& candidate : schema["enum"]) ok = ok || candidate == value;
    if (!ok) {
      *error = path + ": not in enum";
      return;
    }
  }
  if (value.is_object()) {
    if (schema.contains("required"))
      for (const auto& key : schema["required"])
        if (!value.contains(key.get<std::string>())) {
          *error = path + ": missing required key " + key.get<std::string>();
          return;
        }
    if (schema.contains("properties"))
      for (const auto& [key, sub] : schema["properties"].items())
        if (value.contains(key))
          check_schema(value[key], sub, path + "." + key, error);
  }
  if (value.is_array() && schema.contains("items")) {
    std::size_t i = 0;
    for (const auto& element : value) {
      check_schema(element, schema["items"], path + "[" + std::to_string(i++) + "]",
                   error);
      if (!error->empty()) return;
    }
  }
}

inline std::string validate_against_schema(const nlohmann::json& value,
                                           const nlohmann::json& schema) {
  std::string error;
  check_schema(value, schema, "$", &error);
  return error;
}

}  // namespace testsup
