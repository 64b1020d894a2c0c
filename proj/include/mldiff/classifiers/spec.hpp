#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "mldiff/config.hpp"
#include "mldiff/error.hpp"

namespace mldiff {

/// An in-repo classifier variant and its configuration.
struct ClassifierSpec {
  Family family = Family::DUMMY;
  std::string variant;
  CanonicalConfig hyperparameters;
  std::optional<std::uint64_t> train_seed;

  friend bool operator==(const ClassifierSpec&, const ClassifierSpec&) = default;
};

struct VariantInfo {
  std::string_view name;
  Family family;
};

inline constexpr std::array<VariantInfo, 10> variant_catalogue{{
    {"gnb-a", Family::GNB},
    {"gnb-b", Family::GNB},
    {"mnb", Family::MNB},
    {"knn-a", Family::KNN},
    {"knn-b", Family::KNN},
    {"lr-gd", Family::LR},
    {"lr-irls", Family::LR},
    {"dummy-prior", Family::DUMMY},
    {"dummy-hard", Family::DUMMY},
    {"rf", Family::RF},
}};

inline std::optional<Family> family_of(std::string_view variant) {
  for (const auto& v : variant_catalogue) {
    if (v.name == variant) return v.family;
  }
  return std::nullopt;
}

inline std::string known_variants() {
  std::string out;
  for (const auto& v : variant_catalogue) {
    if (!out.empty()) out += ", ";
    out += v.name;
  }
  return out;
}

/// Builds a validated spec: defaults filled, RF seeded, LR lasso only on lr-gd.
inline ClassifierSpec make_spec(std::string_view variant, const CanonicalConfig& params = {},
                                std::optional<std::uint64_t> train_seed = std::nullopt) {
  auto family = family_of(variant);
  if (!family) {
    throw InvalidArgument("unknown classifier variant '" + std::string(variant) + "' (known: " +
                          known_variants() + ")");
  }
  ClassifierSpec spec{*family, std::string(variant), validated(*family, params), train_seed};
  if (spec.family == Family::RF && !spec.train_seed) {
    throw InvalidArgument("variant 'rf' requires a train seed");
  }
  if (spec.family != Family::RF) spec.train_seed.reset();
  if (spec.variant == "lr-irls" && spec.hyperparameters.get_string("penalty") == "lasso") {
    throw InvalidArgument("lr-irls does not support the lasso penalty");
  }
  return spec;
}

/// Parses "variant[:key=value,...]"; the key `seed` sets the train seed.
/// Example: "rf:n_trees=100,max_features=3,seed=1".
inline ClassifierSpec parse_spec(std::string_view text) {
  const auto colon = text.find(':');
  const auto variant = text.substr(0, colon);
  auto family = family_of(variant);
  if (!family) {
    throw InvalidArgument("unknown classifier variant '" + std::string(variant) + "' (known: " +
                          known_variants() + ")");
  }
  CanonicalConfig params;
  std::optional<std::uint64_t> seed;
  if (colon != std::string_view::npos) {
    auto rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw InvalidArgument("expected key=value in classifier spec, got '" + std::string(item) + "'");
      }
      const std::string key(item.substr(0, eq));
      const auto value = item.substr(eq + 1);
      if (key == "seed") {
        std::uint64_t s = 0;
        auto res = std::from_chars(value.data(), value.data() + value.size(), s);
        if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
          throw InvalidArgument("seed must be a non-negative integer, got '" + std::string(value) + "'");
        }
        seed = s;
      } else {
        params.set(key, parse_config_value(*family, key, value));
      }
    }
  }
  return make_spec(variant, params, seed);
}

/// Canonical identifier: variant plus every effective hyperparameter, sorted.
inline std::string spec_id(const ClassifierSpec& spec) {
  std::string out = spec.variant;
  std::string params;
  for (const auto& [key, value] : spec.hyperparameters.values()) {
    if (!params.empty()) params += ',';
    params += key + "=" + to_string(value);
  }
  if (spec.train_seed) {
    if (!params.empty()) params += ',';
    params += "seed=" + std::to_string(*spec.train_seed);
  }
  if (!params.empty()) out += ":" + params;
  return out;
}

}  // namespace mldiff
