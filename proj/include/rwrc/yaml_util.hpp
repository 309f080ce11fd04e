#pragma once

#include <yaml-cpp/yaml.h>

#include <string>

#include "rwrc/errors.hpp"

namespace rwrc {

inline std::string yaml_where(const YAML::Node& node, const std::string& key) {
  std::string s = "config error";
  const YAML::Mark m = node.Mark();
  if (m.line >= 0) s += " at line " + std::to_string(m.line + 1);
  if (!key.empty()) s += ", key '" + key + "'";
  return s + ": ";
}

template <class T>
T yaml_as(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(yaml_where(node, key) + "value has the wrong type");
  }
}

template <class T>
T yaml_required(const YAML::Node& map, const std::string& key) {
  const YAML::Node v = map[key];
  if (!v) throw ConfigError(yaml_where(map, key) + "missing required key");
  return yaml_as<T>(v, key);
}

template <class T>
T yaml_optional(const YAML::Node& map, const std::string& key, T fallback) {
  const YAML::Node v = map[key];
  if (!v) return fallback;
  return yaml_as<T>(v, key);
}

}  // namespace rwrc
