#pragma once

// Minimal JSON-Schema checker covering what the shipped schemas use:
// type, properties, required, items, enum.

#include <fstream>
#include <optional>
#include <string>

#include "json.hpp"

namespace dvs::testsupport {

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

inline std::optional<std::string> schema_violation(const nlohmann::json& schema,
                                                   const nlohmann::json& value,
                                                   const std::string& path = "$") {
  if (schema.contains("type")) {
    const std::string t = schema["type"].get<std::string>();
    const bool ok = (t == "object" && value.is_object()) ||
                    (t == "array" && value.is_array()) ||
                    (t == "string" && value.is_string()) ||
                    (t == "number" && value.is_number()) ||
                    (t == "integer" && value.is_number_integer()) ||
                    (t == "boolean" && value.is_boolean());
    if (!ok) return path + ": expected type " + t;
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) {
      if (e == value) {
        found = true;
        break;
      }
    }
    if (!found) return path + ": value not in enum";
  }
  if (schema.contains("required") && value.is_object()) {
    for (const auto& r : schema["required"]) {
      if (!value.contains(r.get<std::string>())) {
        return path + ": missing required key '" + r.get<std::string>() + "'";
      }
    }
  }
  if (schema.contains("properties") && value.is_object()) {
    for (const auto& [key, sub] : schema["properties"].items()) {
      if (value.contains(key)) {
        if (auto err = schema_violation(sub, value.at(key), path + "." + key)) return err;
      }
    }
  }
  if (schema.contains("items") && value.is_array()) {
    std::size_t i = 0;
    for (const auto& item : value) {
      if (auto err = schema_violation(schema["items"], item,
                                      path + "[" + std::to_string(i) + "]")) {
        return err;
      }
      ++i;
    }
  }
  return std::nullopt;
}

}  // namespace dvs::testsupport
