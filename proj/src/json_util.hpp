#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"

#include "fracfield/errors.hpp"

namespace fracfield::detail {

// Strict-schema helpers: every object is checked against its list of known keys.
inline void require_object(const nlohmann::json& j, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected a JSON object");
}

inline void reject_unknown_keys(const nlohmann::json& j, std::string_view where,
                                std::initializer_list<std::string_view> known) {
  require_object(j, where);
  for (const auto& item : j.items()) {
    bool ok = false;
    for (std::string_view k : known) ok = ok || item.key() == k;
    if (!ok) throw ConfigError(std::string(where) + ": unknown key '" + item.key() + "'");
  }
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback, std::string_view where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string(where) + "." + key + ": wrong type");
  }
}

}  // namespace fracfield::detail
