#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mldiff/adapter/external.hpp"
#include "mldiff/adapter/registry.hpp"
#include "mldiff/classifiers/spec.hpp"
#include "mldiff/diffengine.hpp"
#include "mldiff/error.hpp"
#include "mldiff/recipe.hpp"

namespace mldiff::campaign {

struct ExternalParticipant {
  adapter::AdapterSpec adapter;
  adapter::AdapterParams params;
};

/// One side of a pair: an in-repo variant or an external adapter.
struct Participant {
  std::string id;
  std::optional<ClassifierSpec> spec;
  std::optional<ExternalParticipant> external;

  bool is_external() const noexcept { return external.has_value(); }
};

struct PairSpec {
  std::string id;
  Participant a;
  Participant b;
};

struct CampaignConfig {
  std::vector<PairSpec> pairs;
  std::vector<DatasetRecipe> datasets;
  std::uint64_t split_seed = 0;
  EngineConfig engine;
  std::optional<std::size_t> replicates;
  std::filesystem::path output_dir = "mldiff-report";
};

namespace detail {

using nlohmann::json;

inline ConfigValue config_value(const json& v, const std::string& key) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return static_cast<std::int64_t>(v.get<bool>());
  throw InvalidArgument("hyperparameter '" + key + "' must be a number or string");
}

inline CanonicalConfig canonical_from_json(const json& obj, std::optional<Family> family) {
  CanonicalConfig cfg;
  if (obj.is_null()) return cfg;
  if (!obj.is_object()) throw InvalidArgument("hyperparameters must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    // Parse through the schema when there is one, so "3" and 3 mean the same.
    if (family && value.is_string()) {
      cfg.set(key, parse_config_value(*family, key, value.get<std::string>()));
    } else {
      cfg.set(key, config_value(value, key));
    }
  }
  return cfg;
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

inline Participant parse_participant(const json& j, const std::filesystem::path& base) {
  Participant p;
  if (j.is_string()) {
    p.spec = parse_spec(j.get<std::string>());
  } else if (j.is_object() && j.contains("adapter")) {
    const auto& a = j["adapter"];
    ExternalParticipant ext;
    if (a.is_string()) {
      ext.adapter.executable = resolve(base, a.get<std::string>());
    } else {
      ext.adapter.executable = resolve(base, a.at("executable").get<std::string>());
      ext.adapter.extra_args = a.value("args", std::vector<std::string>{});
      ext.adapter.scores_available = a.value("scores", true);
      ext.adapter.timeout_seconds = a.value("timeout", 60.0);
    }
    ext.adapter.validate();
    ext.params.family = j.value("family", std::string{});
    ext.params.canonical = canonical_from_json(j.value("canonical", json()), std::nullopt);
    if (j.contains("target")) {
      if (ext.params.family.empty()) throw InvalidArgument("adapter participant with a target needs a family");
      ext.params.rendered = adapter::translate(ext.params.canonical, ext.params.family, j["target"].get<std::string>());
    } else {
      ext.params.rendered.framework = "external";
      ext.params.rendered.algorithm = ext.adapter.executable.filename().string();
    }
    std::string label = ext.adapter.executable.filename().string();
    for (const auto& arg : ext.adapter.extra_args) label += " " + arg;
    if (j.contains("target")) label += " [" + ext.params.rendered.framework + ":" + ext.params.rendered.algorithm + "]";
    p.id = j.value("id", "adapter:" + label);
    p.external = std::move(ext);
    return p;
  } else if (j.is_object()) {
    const auto variant = j.at("variant").get<std::string>();
    std::optional<std::uint64_t> seed;
    if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
    p.spec = make_spec(variant, canonical_from_json(j.value("params", json()), family_of(variant)), seed);
    if (j.contains("id")) p.id = j["id"].get<std::string>();
  } else {
    throw InvalidArgument("participant must be a spec string or an object");
  }
  if (p.id.empty()) p.id = spec_id(*p.spec);
  return p;
}

inline DatasetRecipe parse_dataset(const json& j, const std::filesystem::path& base) {
  DatasetRecipe r;
  if (j.is_string()) {
    r = parse_recipe(j.get<std::string>());
  } else if (j.is_object()) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "uniform" || kind == "random") {
      r.kind = kind == "uniform" ? DatasetRecipe::Kind::uniform : DatasetRecipe::Kind::random;
      r.n = j.value("n", std::size_t{200});
      r.m = j.value("m", std::size_t{10});
      r.seed = j.value("seed", std::uint64_t{0});
    } else if (kind == "csv") {
      r.kind = DatasetRecipe::Kind::csv;
      r.path = j.at("path").get<std::string>();
      r.label_column = j.value("label_column", std::string("label"));
      r.normalize = j.value("normalize", true);
    } else if (kind == "bc" || kind == "wine") {
      r = kind == "bc" ? bc_recipe() : wine_recipe();
    } else {
      throw InvalidArgument("unknown dataset kind '" + kind + "'");
    }
    if (j.contains("name")) r.name = j["name"].get<std::string>();
  } else {
    throw InvalidArgument("dataset must be a recipe string or an object");
  }
  if (r.kind == DatasetRecipe::Kind::csv && r.path.is_relative() && !base.empty() &&
      !std::filesystem::exists(r.path)) {
    r.path = base / r.path;
  }
  return r;
}

/// Appends "#2", "#3", ... to repeated ids so every id is unique.
inline void make_unique(std::vector<std::string*> ids) {
  std::map<std::string, int> seen;
  for (auto* id : ids) {
    const int k = ++seen[*id];
    if (k > 1) *id += "#" + std::to_string(k);
  }
}

}  // namespace detail

/// Builds and validates a campaign from its JSON form. Relative paths
/// resolve against `base_dir` (the config file's directory).
inline CampaignConfig parse_campaign(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  try {
    if (!j.is_object()) throw InvalidArgument("campaign config must be a JSON object");
    CampaignConfig cfg;
    for (const auto& pj : j.at("pairs")) {
      PairSpec pair;
      if (pj.is_array()) {
        if (pj.size() != 2) throw InvalidArgument("a pair needs exactly two participants");
        pair.a = detail::parse_participant(pj[0], base_dir);
        pair.b = detail::parse_participant(pj[1], base_dir);
      } else {
        pair.a = detail::parse_participant(pj.at("a"), base_dir);
        pair.b = detail::parse_participant(pj.at("b"), base_dir);
        if (pj.contains("id")) pair.id = pj["id"].get<std::string>();
      }
      if (pair.id.empty()) pair.id = pair.a.id + " vs " + pair.b.id;
      cfg.pairs.push_back(std::move(pair));
    }
    for (const auto& dj : j.at("datasets")) cfg.datasets.push_back(detail::parse_dataset(dj, base_dir));
    if (cfg.pairs.empty()) throw InvalidArgument("campaign needs at least one pair");
    if (cfg.datasets.empty()) throw InvalidArgument("campaign needs at least one dataset");

    std::vector<std::string*> ids;
    for (auto& p : cfg.pairs) ids.push_back(&p.id);
    detail::make_unique(ids);
    std::vector<std::string> names;
    for (const auto& d : cfg.datasets) names.push_back(recipe_name(d));
    std::vector<std::string*> name_ptrs;
    for (auto& n : names) name_ptrs.push_back(&n);
    detail::make_unique(name_ptrs);
    for (std::size_t i = 0; i < names.size(); ++i) cfg.datasets[i].name = names[i];

    cfg.split_seed = j.value("split_seed", std::uint64_t{0});
    if (j.contains("engine")) {
      const auto& e = j["engine"];
      cfg.engine.score_tolerance = e.value("score_tolerance", cfg.engine.score_tolerance);
      cfg.engine.alpha = e.value("alpha", cfg.engine.alpha);
      cfg.engine.yates_correction = e.value("yates_correction", cfg.engine.yates_correction);
      const auto ks = e.value("ks_method", std::string("automatic"));
      if (ks == "automatic") {
        cfg.engine.ks_method = stats::KsMethod::automatic;
      } else if (ks == "exact") {
        cfg.engine.ks_method = stats::KsMethod::exact;
      } else if (ks == "asymptotic") {
        cfg.engine.ks_method = stats::KsMethod::asymptotic;
      } else {
        throw InvalidArgument("unknown ks_method '" + ks + "'");
      }
    }
    cfg.engine.validate();
    if (j.contains("replicates") && !j["replicates"].is_null()) {
      const auto r = j["replicates"].get<std::int64_t>();
      if (r < 1) throw InvalidArgument("replicates must be >= 1");
      cfg.replicates = static_cast<std::size_t>(r);
    }
    if (j.contains("output_dir")) cfg.output_dir = detail::resolve(base_dir, j["output_dir"].get<std::string>());
    return cfg;
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidArgument(std::string("campaign config: ") + ex.what());
  }
}

inline CampaignConfig load_campaign(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open campaign config '" + path.string() + "': file not found");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError("campaign config '" + path.string() + "': " + ex.what());
  }
  return parse_campaign(j, path.parent_path());
}

}  // namespace mldiff::campaign
