#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "mldiff/csv.hpp"
#include "mldiff/dataset.hpp"
#include "mldiff/error.hpp"

#ifndef MLDIFF_DATA_DIR
#define MLDIFF_DATA_DIR "data"
#endif

namespace mldiff {

/// How to materialize one input dataset.
struct DatasetRecipe {
  enum class Kind { uniform, random, csv };
  Kind kind = Kind::uniform;
  std::size_t n = 200;
  std::size_t m = 10;
  std::uint64_t seed = 0;
  std::filesystem::path path;        // csv only
  std::string label_column = "label";
  bool normalize = true;
  std::string name;                  // optional display name

  friend bool operator==(const DatasetRecipe&, const DatasetRecipe&) = default;
};

/// Directory holding the bundled fixtures (bc.csv, wine.csv, registry.json);
/// MLDIFF_DATA_DIR in the environment overrides the compiled-in location.
inline std::filesystem::path data_dir() {
  if (const char* env = std::getenv("MLDIFF_DATA_DIR"); env && *env) return env;
  return MLDIFF_DATA_DIR;
}

inline DatasetRecipe uniform_recipe(std::size_t n, std::size_t m, std::uint64_t seed) {
  return {DatasetRecipe::Kind::uniform, n, m, seed, {}, "label", true, {}};
}
inline DatasetRecipe random_recipe(std::size_t n, std::size_t m, std::uint64_t seed) {
  return {DatasetRecipe::Kind::random, n, m, seed, {}, "label", true, {}};
}
inline DatasetRecipe csv_recipe(std::filesystem::path path, std::string name = {}, bool normalize = true) {
  DatasetRecipe r;
  r.kind = DatasetRecipe::Kind::csv;
  r.path = std::move(path);
  r.name = std::move(name);
  r.normalize = normalize;
  return r;
}
/// The UCI breast-cancer fixture (569 x 30), min-max normalized.
inline DatasetRecipe bc_recipe() { return csv_recipe(data_dir() / "bc.csv", "bc"); }
/// The UCI wine fixture (178 x 13), first cultivar vs the rest, normalized.
inline DatasetRecipe wine_recipe() { return csv_recipe(data_dir() / "wine.csv", "wine"); }

inline std::string recipe_name(const DatasetRecipe& r) {
  if (!r.name.empty()) return r.name;
  switch (r.kind) {
    case DatasetRecipe::Kind::uniform:
    case DatasetRecipe::Kind::random:
      return std::string(r.kind == DatasetRecipe::Kind::uniform ? "uniform" : "random") + "(n=" +
             std::to_string(r.n) + ",m=" + std::to_string(r.m) + ",seed=" + std::to_string(r.seed) + ")";
    case DatasetRecipe::Kind::csv: return r.path.stem().string();
  }
  return "dataset";
}

inline Dataset materialize(const DatasetRecipe& r) {
  switch (r.kind) {
    case DatasetRecipe::Kind::uniform: {
      auto d = generate_uniform(r.n, r.m, r.seed);
      return Dataset(recipe_name(r), d.cols(), d.features(), d.labels(), d.seed());
    }
    case DatasetRecipe::Kind::random: {
      auto d = generate_random(r.n, r.m, r.seed);
      return Dataset(recipe_name(r), d.cols(), d.features(), d.labels(), d.seed());
    }
    case DatasetRecipe::Kind::csv: {
      auto d = load_csv(r.path, r.label_column, recipe_name(r));
      return r.normalize ? normalize_minmax(d) : d;
    }
  }
  throw InvalidArgument("unknown dataset recipe kind");
}

/// Parses "uniform:n=200,m=10,seed=1", "random:...", "csv:path=x.csv[,label=label][,normalize=1][,name=x]",
/// or the presets "bc" and "wine".
inline DatasetRecipe parse_recipe(std::string_view text) {
  if (text == "bc") return bc_recipe();
  if (text == "wine") return wine_recipe();
  const auto colon = text.find(':');
  const auto kind = text.substr(0, colon);
  DatasetRecipe r;
  if (kind == "uniform") {
    r.kind = DatasetRecipe::Kind::uniform;
  } else if (kind == "random") {
    r.kind = DatasetRecipe::Kind::random;
  } else if (kind == "csv") {
    r.kind = DatasetRecipe::Kind::csv;
  } else {
    throw InvalidArgument("unknown dataset recipe '" + std::string(text) +
                          "' (expected uniform:..., random:..., csv:..., bc or wine)");
  }
  auto rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  auto to_u64 = [](std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
      throw InvalidArgument("recipe field '" + std::string(key) + "' expects an integer, got '" + std::string(v) + "'");
    }
    return out;
  };
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw InvalidArgument("expected key=value in recipe, got '" + std::string(item) + "'");
    const auto key = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    if (key == "n") {
      r.n = to_u64(key, value);
    } else if (key == "m") {
      r.m = to_u64(key, value);
    } else if (key == "seed") {
      r.seed = to_u64(key, value);
    } else if (key == "path") {
      r.path = std::string(value);
    } else if (key == "label") {
      r.label_column = std::string(value);
    } else if (key == "normalize") {
      r.normalize = value == "1" || value == "true";
    } else if (key == "name") {
      r.name = std::string(value);
    } else {
      throw InvalidArgument("unknown recipe field '" + std::string(key) + "'");
    }
  }
  if (r.kind == DatasetRecipe::Kind::csv && r.path.empty()) throw InvalidArgument("csv recipe needs path=...");
  return r;
}

}  // namespace mldiff
