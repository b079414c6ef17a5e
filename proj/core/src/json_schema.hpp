#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>

#include "cognav/errors.hpp"
#include "json.hpp"

// Strict schema-walking helpers. Every reader reports the JSON path of the
// offending node and rejects unknown keys, so a typo in an input file fails
// loudly instead of silently falling back to a default.
namespace cognav::detail {

using nlohmann::json;

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline std::string at_index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

inline const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError("expected object", path);
  return j;
}

inline const json& require_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError("expected array", path);
  return j;
}

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                                const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) throw SchemaError("unknown field", join(path, it.key()));
  }
}

inline const json& require_field(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError("missing field", join(path, key));
  return *it;
}

inline std::string require_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require_field(obj, key, path);
  if (!v.is_string()) throw SchemaError("expected string", join(path, key));
  return v.get<std::string>();
}

inline double as_finite_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError("expected number", path);
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError("expected finite number", path);
  return d;
}

inline double require_number(const json& obj, const char* key, const std::string& path) {
  return as_finite_number(require_field(obj, key, path), join(path, key));
}

inline std::int64_t as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SchemaError("expected integer", path);
  return v.get<std::int64_t>();
}

inline std::int64_t require_integer(const json& obj, const char* key, const std::string& path) {
  return as_integer(require_field(obj, key, path), join(path, key));
}

}  // namespace cognav::detail
