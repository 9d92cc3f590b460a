#pragma once

// Internal helpers shared by the JSON readers/writers. Not installed.

#include <string>
#include <string_view>

#include <json.hpp>

#include "gridshield/errors.hpp"

namespace gridshield::detail {

using json = nlohmann::json;

inline json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw InputError(InputError::Kind::syntax,
                     std::string(what) + ": syntax error at line " + std::to_string(line) +
                         ", column " + std::to_string(column) + ": " + e.what());
  }
}

[[noreturn]] inline void field_error(const std::string& path, const std::string& msg) {
  throw InputError(InputError::Kind::syntax, path + ": " + msg);
}

inline const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) field_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) field_error(path + "." + key, "missing field");
  return *it;
}

inline double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) field_error(path, "expected a number");
  return v.get<double>();
}

inline bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) field_error(path, "expected a boolean");
  return v.get<bool>();
}

inline long long as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) field_error(path, "expected an integer");
  return v.get<long long>();
}

inline std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) field_error(path, "expected a string");
  return v.get<std::string>();
}

/// Ids are text tokens; plain integers are accepted and converted.
inline std::string as_id(const json& v, const std::string& path) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  field_error(path, "expected an id string");
}

inline const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) field_error(path, "expected an array");
  return v;
}

}  // namespace gridshield::detail
