#pragma once

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "cdisim/errors.hpp"

namespace cdisim::detail {

inline int line_of(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.line >= 0 ? mark.line + 1 : 0;
}

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// Closest allowed key to `key`, or empty when nothing is reasonably close.
inline std::string suggest(std::string_view key, const std::vector<std::string>& allowed) {
  std::string best;
  std::size_t best_distance = 4;
  for (const auto& candidate : allowed) {
    const auto d = edit_distance(key, candidate);
    if (d < best_distance) {
      best_distance = d;
      best = candidate;
    }
  }
  return best;
}

/// Rejects any key of a mapping that is not in `allowed`.
inline void require_known_keys(const YAML::Node& map, const std::vector<std::string>& allowed,
                               const std::string& context) {
  if (!map.IsMap()) throw ConfigError(context, line_of(map), "expected a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
    std::string message = "unknown key";
    if (const auto hint = suggest(key, allowed); !hint.empty()) message += " (did you mean '" + hint + "'?)";
    throw ConfigError(context.empty() ? key : context + "." + key, line_of(kv.first), message);
  }
}

inline double as_double(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, line_of(node), "expected a number");
  }
}

inline std::string as_string(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) throw ConfigError(field, line_of(node), "expected a string");
  return node.as<std::string>();
}

inline std::array<double, 2> as_pair(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence() || node.size() != 2) throw ConfigError(field, line_of(node), "expected [lo, hi]");
  std::array<double, 2> out{as_double(node[0], field), as_double(node[1], field)};
  if (!(out[0] <= out[1])) throw ConfigError(field, line_of(node), "lower bound exceeds upper bound");
  return out;
}

inline std::vector<double> as_vector(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence()) throw ConfigError(field, line_of(node), "expected a list of numbers");
  std::vector<double> out;
  out.reserve(node.size());
  for (const auto& v : node) out.push_back(as_double(v, field));
  return out;
}

}  // namespace cdisim::detail
