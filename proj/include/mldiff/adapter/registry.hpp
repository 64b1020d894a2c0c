#pragma once

// Hyperparameter registry: how a canonical configuration is rendered for each
// (group, framework implementation) pair. The table itself lives in
// data/registry.json.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mldiff/classifiers/spec.hpp"
#include "mldiff/config.hpp"
#include "mldiff/csv.hpp"
#include "mldiff/error.hpp"
#include "mldiff/recipe.hpp"

namespace mldiff::adapter {

enum class Transform { identity, reciprocal, half_reciprocal, literal };

inline Transform parse_transform(std::string_view s) {
  if (s == "identity") return Transform::identity;
  if (s == "reciprocal") return Transform::reciprocal;
  if (s == "half_reciprocal") return Transform::half_reciprocal;
  if (s == "literal") return Transform::literal;
  throw ParseError("registry: unknown transform '" + std::string(s) + "'");
}

inline const char* to_string(Transform t) {
  switch (t) {
    case Transform::identity: return "identity";
    case Transform::reciprocal: return "reciprocal";
    case Transform::half_reciprocal: return "half_reciprocal";
    case Transform::literal: return "literal";
  }
  return "?";
}

/// x -> rendered value. reciprocal is 1/x, half_reciprocal is 1/(2x).
inline double apply_transform(Transform t, double x) {
  switch (t) {
    case Transform::reciprocal:
    case Transform::half_reciprocal:
      if (x == 0.0) throw InvalidArgument(std::string(to_string(t)) + " transform of 0 is undefined");
      return t == Transform::reciprocal ? 1.0 / x : 1.0 / (2.0 * x);
    case Transform::identity: return x;
    case Transform::literal: break;
  }
  throw InvalidArgument("literal mappings carry no canonical value");
}

/// Rendered value -> x.
inline double invert_transform(Transform t, double y) {
  switch (t) {
    case Transform::reciprocal:
    case Transform::half_reciprocal:
      if (y == 0.0) throw InvalidArgument("cannot invert a zero rendering");
      return t == Transform::reciprocal ? 1.0 / y : 1.0 / (2.0 * y);
    case Transform::identity: return y;
    case Transform::literal: break;
  }
  throw InvalidArgument("literal mappings have no inverse");
}

struct Mapping {
  std::optional<std::string> canonical_key;  // absent for literals
  std::string fixed;                         // literal value; may be empty for bare flags
  std::string target_name;
  Transform transform = Transform::identity;
  // Optional wrapper around the rendered value; "{}" marks the value.
  std::optional<std::string> format;
};

struct RegistryEntry {
  std::string family;  // group name, e.g. RIDGE
  std::string framework;
  std::string algorithm;
  bool scores = true;
  bool executable = true;
  std::vector<Mapping> mappings;

  std::string target() const { return framework + ":" + algorithm; }
};

/// A framework-native rendering: ordered (name, value) pairs.
struct FrameworkParamSet {
  std::string framework;
  std::string algorithm;
  std::vector<std::pair<std::string, std::string>> params;

  /// Command-line style for weka ("-K 5 -S"), name=value list otherwise.
  std::string render() const {
    std::string out;
    for (const auto& [name, value] : params) {
      if (!out.empty()) out += framework == "weka" ? " " : ", ";
      if (framework == "weka") {
        out += value.empty() ? name : name + " " + value;
      } else {
        out += name + "=" + value;
      }
    }
    return out;
  }

  const std::string* find(std::string_view name) const {
    for (const auto& p : params) {
      if (p.first == name) return &p.second;
    }
    return nullptr;
  }

  friend bool operator==(const FrameworkParamSet&, const FrameworkParamSet&) = default;
};

class Registry {
 public:
  static Registry from_json(const nlohmann::json& doc) {
    if (!doc.is_array()) throw ParseError("registry: top level must be an array");
    Registry reg;
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const auto& e = doc[i];
      const auto where = "registry entry " + std::to_string(i);
      try {
        RegistryEntry entry;
        entry.family = e.at("family").get<std::string>();
        entry.framework = e.at("framework").get<std::string>();
        entry.algorithm = e.at("algorithm").get<std::string>();
        entry.scores = e.value("scores", true);
        entry.executable = e.value("executable", true);
        for (const auto& m : e.value("mappings", nlohmann::json::array())) {
          Mapping mp;
          mp.target_name = m.at("target_name").get<std::string>();
          mp.transform = parse_transform(m.at("transform").get<std::string>());
          if (m.contains("format")) mp.format = m["format"].get<std::string>();
          if (mp.transform == Transform::literal) {
            mp.fixed = m.at("fixed").get<std::string>();
          } else {
            mp.canonical_key = m.at("canonical_key").get<std::string>();
          }
          if (mp.format && mp.format->find("{}") == std::string::npos) {
            throw ParseError(where + ": format must contain {}");
          }
          entry.mappings.push_back(std::move(mp));
        }
        for (const auto& other : reg.entries_) {
          if (other.family == entry.family && other.target() == entry.target()) {
            throw ParseError(where + ": duplicate " + entry.family + " / " + entry.target());
          }
        }
        reg.entries_.push_back(std::move(entry));
      } catch (const nlohmann::json::exception& ex) {
        throw ParseError(where + ": " + ex.what());
      }
    }
    return reg;
  }

  static Registry load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open registry '" + path.string() + "'");
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& ex) {
      throw ParseError("registry '" + path.string() + "': " + ex.what());
    }
  }

  /// The registry shipped in data/registry.json (loaded once).
  static const Registry& builtin() {
    static const Registry reg = load(data_dir() / "registry.json");
    return reg;
  }

  const std::vector<RegistryEntry>& entries() const noexcept { return entries_; }

  std::vector<std::string> families() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) {
      if (std::find(out.begin(), out.end(), e.family) == out.end()) out.push_back(e.family);
    }
    return out;
  }

  std::vector<std::string> targets(std::string_view family) const {
    std::vector<std::string> out;
    for (const auto& e : entries_) {
      if (e.family == family) out.push_back(e.target());
    }
    return out;
  }

  /// Canonical keys used by any implementation of the group.
  std::set<std::string> canonical_keys(std::string_view family) const {
    std::set<std::string> out;
    for (const auto& e : entries_) {
      if (e.family != family) continue;
      for (const auto& m : e.mappings) {
        if (m.canonical_key) out.insert(*m.canonical_key);
      }
    }
    return out;
  }

  /// Looks up "framework:algorithm" (or "framework-algorithm"); a bare
  /// framework name is accepted when the group has one implementation there.
  const RegistryEntry& find(std::string_view family, std::string_view target) const {
    const auto sep = target.find_first_of(":-");
    const auto framework = target.substr(0, sep);
    const auto algorithm = sep == std::string_view::npos ? std::string_view{} : target.substr(sep + 1);
    const RegistryEntry* hit = nullptr;
    std::size_t matches = 0;
    for (const auto& e : entries_) {
      if (e.family != family || e.framework != framework) continue;
      if (!algorithm.empty() && e.algorithm != algorithm) continue;
      hit = &e;
      ++matches;
    }
    if (matches == 1) return *hit;
    std::string known;
    for (const auto& t : targets(family)) known += (known.empty() ? "" : ", ") + t;
    if (known.empty()) {
      for (const auto& f : families()) known += (known.empty() ? "" : ", ") + f;
      throw NotInRegistry("no registry group '" + std::string(family) + "' (known groups: " + known + ")");
    }
    throw NotInRegistry(std::string(matches ? "ambiguous" : "no") + " registry entry for " + std::string(family) +
                        " / " + std::string(target) + " (known targets: " + known + ")");
  }

 private:
  std::vector<RegistryEntry> entries_;
};

namespace detail {

inline std::string render_number(const ConfigValue& v, Transform t) {
  if (const auto* i = std::get_if<std::int64_t>(&v); i && t == Transform::identity) return std::to_string(*i);
  if (const auto* s = std::get_if<std::string>(&v)) {
    if (t != Transform::identity) throw InvalidArgument("cannot apply " + std::string(to_string(t)) + " to '" + *s + "'");
    return *s;
  }
  const double x = std::holds_alternative<double>(v) ? std::get<double>(v)
                                                     : static_cast<double>(std::get<std::int64_t>(v));
  return format_double(apply_transform(t, x));
}

inline std::string wrap(const std::optional<std::string>& format, const std::string& value) {
  if (!format) return value;
  auto out = *format;
  out.replace(out.find("{}"), 2, value);
  return out;
}

inline std::string unwrap(const std::optional<std::string>& format, const std::string& value) {
  if (!format) return value;
  const auto at = format->find("{}");
  const auto prefix = format->substr(0, at), suffix = format->substr(at + 2);
  if (value.size() < prefix.size() + suffix.size() || value.compare(0, prefix.size(), prefix) != 0 ||
      value.compare(value.size() - suffix.size(), suffix.size(), suffix) != 0) {
    throw ParseError("rendering '" + value + "' does not match format '" + *format + "'");
  }
  return value.substr(prefix.size(), value.size() - prefix.size() - suffix.size());
}

}  // namespace detail

/// Renders `cfg` for the implementation `target` of registry group `family`.
inline FrameworkParamSet translate(const CanonicalConfig& cfg, std::string_view family, std::string_view target,
                                   const Registry& reg = Registry::builtin()) {
  const auto& entry = reg.find(family, target);
  const auto keys = reg.canonical_keys(family);
  for (const auto& [key, value] : cfg.values()) {
    if (!keys.count(key)) {
      throw InvalidArgument("'" + key + "' is not a canonical hyperparameter of " + std::string(family));
    }
  }
  FrameworkParamSet out{entry.framework, entry.algorithm, {}};
  for (const auto& m : entry.mappings) {
    if (m.transform == Transform::literal) {
      out.params.emplace_back(m.target_name, m.fixed);
      continue;
    }
    if (!cfg.has(*m.canonical_key)) {
      throw InvalidArgument(entry.family + " / " + entry.target() + " needs canonical hyperparameter '" +
                            *m.canonical_key + "'");
    }
    out.params.emplace_back(m.target_name, detail::wrap(m.format, detail::render_number(cfg.at(*m.canonical_key), m.transform)));
  }
  return out;
}

/// Inverse of translate for the non-literal mappings: recovers canonical values.
inline CanonicalConfig parse_rendering(const FrameworkParamSet& params, std::string_view family,
                                       const Registry& reg = Registry::builtin()) {
  const auto& entry = reg.find(family, params.framework + ":" + params.algorithm);
  CanonicalConfig out;
  for (const auto& m : entry.mappings) {
    if (m.transform == Transform::literal) continue;
    const auto* raw = params.find(m.target_name);
    if (!raw) throw ParseError("rendering lacks '" + m.target_name + "'");
    const auto text = detail::unwrap(m.format, *raw);
    double y = 0;
    if (!csv::parse_double(text, y)) {
      if (m.transform != Transform::identity) throw ParseError("'" + m.target_name + "' is not numeric: " + text);
      out.set(*m.canonical_key, text);
      continue;
    }
    std::int64_t i = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), i);
    if (m.transform == Transform::identity && res.ec == std::errc{} && res.ptr == text.data() + text.size()) {
      out.set(*m.canonical_key, i);
    } else {
      out.set(*m.canonical_key, invert_transform(m.transform, y));
    }
  }
  return out;
}

/// Registry group and canonical config corresponding to an in-repo spec:
/// LR maps to LR / RIDGE / LASSO by penalty, RF to RF1 (depth-limited) or RF2.
inline std::pair<std::string, CanonicalConfig> registry_view(const ClassifierSpec& spec) {
  const auto& hp = spec.hyperparameters;
  CanonicalConfig cfg;
  switch (spec.family) {
    case Family::GNB: return {"GNB", cfg};
    case Family::MNB: return {"MNB", cfg};
    case Family::DUMMY: return {"DUMMY", cfg};
    case Family::KNN:
      cfg.set("k", hp.at("k"));
      return {"KNN", cfg};
    case Family::LR: {
      const auto& penalty = hp.get_string("penalty");
      if (penalty == "none") return {"LR", cfg};
      cfg.set("alpha", hp.at("alpha"));
      return {penalty == "ridge" ? "RIDGE" : "LASSO", cfg};
    }
    case Family::RF:
      cfg.set("n_trees", hp.at("n_trees"));
      cfg.set("max_features", hp.at("max_features"));
      if (hp.has("max_depth")) {
        cfg.set("max_depth", hp.at("max_depth"));
        return {"RF1", cfg};
      }
      return {"RF2", cfg};
  }
  throw InvalidArgument("no registry group for " + spec.variant);
}

}  // namespace mldiff::adapter
