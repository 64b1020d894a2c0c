#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mldiff/csv.hpp"
#include "mldiff/error.hpp"

namespace mldiff {

using ConfigValue = std::variant<std::int64_t, double, std::string>;

inline std::string to_string(const ConfigValue& v) {
  if (auto i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (auto d = std::get_if<double>(&v)) return format_double(*d);
  return std::get<std::string>(v);
}

/// Canonical hyperparameters: the harness-internal values from which every
/// framework rendering is derived. Keys are ordered, so iteration is stable.
class CanonicalConfig {
 public:
  CanonicalConfig() = default;
  CanonicalConfig(std::initializer_list<std::pair<const std::string, ConfigValue>> init) : values_(init) {}

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, ConfigValue v) { values_[key] = std::move(v); }
  void erase(const std::string& key) { values_.erase(key); }

  const ConfigValue& at(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw InvalidArgument("missing hyperparameter '" + key + "'");
    return it->second;
  }

  double get_real(const std::string& key) const {
    const auto& v = at(key);
    if (auto i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (auto d = std::get_if<double>(&v)) return *d;
    throw InvalidArgument("hyperparameter '" + key + "' is not numeric");
  }
  std::int64_t get_int(const std::string& key) const {
    const auto& v = at(key);
    if (auto i = std::get_if<std::int64_t>(&v)) return *i;
    if (auto d = std::get_if<double>(&v); d && std::floor(*d) == *d) return static_cast<std::int64_t>(*d);
    throw InvalidArgument("hyperparameter '" + key + "' is not an integer");
  }
  const std::string& get_string(const std::string& key) const {
    const auto& v = at(key);
    if (auto s = std::get_if<std::string>(&v)) return *s;
    throw InvalidArgument("hyperparameter '" + key + "' is not a string");
  }

  const std::map<std::string, ConfigValue>& values() const noexcept { return values_; }
  bool empty() const noexcept { return values_.empty(); }

  friend bool operator==(const CanonicalConfig&, const CanonicalConfig&) = default;

 private:
  std::map<std::string, ConfigValue> values_;
};

/// One declared canonical hyperparameter of a classifier family.
struct ParamSchema {
  enum class Kind { integer, real, choice };
  std::string name;
  Kind kind = Kind::real;
  double minimum = 0.0;                 // inclusive lower bound for numbers
  std::vector<std::string> choices;     // for Kind::choice
  std::optional<ConfigValue> fallback;  // default; nullopt means optional without default
};

enum class Family { GNB, MNB, KNN, LR, DUMMY, RF };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::GNB: return "GNB";
    case Family::MNB: return "MNB";
    case Family::KNN: return "KNN";
    case Family::LR: return "LR";
    case Family::DUMMY: return "DUMMY";
    case Family::RF: return "RF";
  }
  return "?";
}

inline const std::vector<ParamSchema>& family_schema(Family f) {
  using K = ParamSchema::Kind;
  static const std::vector<ParamSchema> none;
  static const std::vector<ParamSchema> mnb{{"laplace_alpha", K::real, 0.0, {}, ConfigValue{1.0}}};
  static const std::vector<ParamSchema> knn{{"k", K::integer, 1.0, {}, ConfigValue{std::int64_t{5}}}};
  static const std::vector<ParamSchema> lr{
      {"alpha", K::real, 0.0, {}, ConfigValue{0.0}},
      {"max_iter", K::integer, 1.0, {}, ConfigValue{std::int64_t{10000}}},
      {"penalty", K::choice, 0.0, {"none", "ridge", "lasso"}, ConfigValue{std::string("none")}},
  };
  static const std::vector<ParamSchema> rf{
      {"max_depth", K::integer, 1.0, {}, std::nullopt},
      {"max_features", K::integer, 1.0, {}, ConfigValue{std::int64_t{3}}},
      {"n_trees", K::integer, 1.0, {}, ConfigValue{std::int64_t{100}}},
  };
  switch (f) {
    case Family::MNB: return mnb;
    case Family::KNN: return knn;
    case Family::LR: return lr;
    case Family::RF: return rf;
    default: return none;
  }
}

/// Schema entry for `key`, or nullptr when the family has no such parameter.
inline const ParamSchema* find_param(Family f, std::string_view key) {
  for (const auto& p : family_schema(f)) {
    if (p.name == key) return &p;
  }
  return nullptr;
}

/// Parses the textual value of `key` according to the family schema.
inline ConfigValue parse_config_value(Family f, const std::string& key, std::string_view text) {
  const auto* p = find_param(f, key);
  if (!p) throw InvalidArgument("family " + to_string(f) + " has no hyperparameter '" + key + "'");
  switch (p->kind) {
    case ParamSchema::Kind::integer: {
      std::int64_t v = 0;
      auto res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw InvalidArgument("hyperparameter '" + key + "' expects an integer, got '" + std::string(text) + "'");
      }
      return v;
    }
    case ParamSchema::Kind::real: {
      double v = 0;
      if (!csv::parse_double(text, v)) {
        throw InvalidArgument("hyperparameter '" + key + "' expects a number, got '" + std::string(text) + "'");
      }
      return v;
    }
    case ParamSchema::Kind::choice: return std::string(text);
  }
  return std::string(text);
}

/// Fills defaults and checks every key against the family schema. Integer
/// values given for real parameters are widened; whole reals given for
/// integer parameters are narrowed.
inline CanonicalConfig validated(Family f, const CanonicalConfig& cfg) {
  CanonicalConfig out;
  for (const auto& [key, value] : cfg.values()) {
    const auto* p = find_param(f, key);
    if (!p) throw InvalidArgument("family " + to_string(f) + " has no hyperparameter '" + key + "'");
    switch (p->kind) {
      case ParamSchema::Kind::integer: {
        const auto v = cfg.get_int(key);
        if (static_cast<double>(v) < p->minimum) {
          throw InvalidArgument("hyperparameter '" + key + "' must be >= " + format_double(p->minimum));
        }
        out.set(key, v);
        break;
      }
      case ParamSchema::Kind::real: {
        const auto v = cfg.get_real(key);
        if (!std::isfinite(v) || v < p->minimum) {
          throw InvalidArgument("hyperparameter '" + key + "' must be finite and >= " + format_double(p->minimum));
        }
        out.set(key, v);
        break;
      }
      case ParamSchema::Kind::choice: {
        const auto& v = cfg.get_string(key);
        if (std::find(p->choices.begin(), p->choices.end(), v) == p->choices.end()) {
          throw InvalidArgument("hyperparameter '" + key + "' has invalid value '" + v + "'");
        }
        out.set(key, v);
        break;
      }
    }
  }
  for (const auto& p : family_schema(f)) {
    if (!out.has(p.name) && p.fallback) out.set(p.name, *p.fallback);
  }
  return out;
}

}  // namespace mldiff
