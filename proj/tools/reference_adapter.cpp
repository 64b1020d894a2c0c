// Reference adapter: speaks the external protocol using the in-repo
// classifiers. The variant comes from --variant; canonical hyperparameters in
// params.json override the variant's own.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mldiff/adapter/external.hpp"
#include "mldiff/classifiers/model.hpp"
#include "mldiff/csv.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mldiff reference adapter"};
  std::string train_path, test_path, params_path, out_train, out_test, variant;
  bool no_scores = false;
  app.add_option("--train", train_path)->required();
  app.add_option("--test", test_path)->required();
  app.add_option("--params", params_path)->required();
  app.add_option("--out-train", out_train)->required();
  app.add_option("--out-test", out_test)->required();
  app.add_option("--variant", variant, "classifier spec, e.g. rf:seed=1")->required();
  app.add_flag("--no-scores", no_scores, "write classes only");
  CLI11_PARSE(app, argc, argv);

  try {
    using namespace mldiff;
    auto spec = parse_spec(variant);
    std::ifstream in(params_path);
    if (!in) throw IoError("cannot open " + params_path);
    const auto params = nlohmann::json::parse(in);
    CanonicalConfig hp = spec.hyperparameters;
    const auto group = params.value("family", std::string{});
    if (spec.family == Family::LR && (group == "LR" || group == "RIDGE" || group == "LASSO")) {
      hp.set("penalty", group == "LR" ? "none" : group == "RIDGE" ? "ridge" : "lasso");
    }
    const auto canonical = params.value("canonical", nlohmann::json::object());
    for (const auto& [key, value] : canonical.items()) {
      if (!find_param(spec.family, key)) continue;
      if (value.is_number_integer()) {
        hp.set(key, value.get<std::int64_t>());
      } else if (value.is_number()) {
        hp.set(key, value.get<double>());
      } else if (value.is_string()) {
        hp.set(key, parse_config_value(spec.family, key, value.get<std::string>()));
      }
    }
    spec = make_spec(spec.variant, hp, spec.train_seed);

    const auto train_set = read_dataset_csv(train_path, "train");
    const auto test_set = read_dataset_csv(test_path, "test");
    const auto model = train(spec, train_set);
    auto predictions = [&](const Dataset& d) {
      auto p = predict_partition(model, d);
      if (no_scores) p.scores.reset();
      return p;
    };
    adapter::write_predictions(out_train, predictions(train_set));
    adapter::write_predictions(out_test, predictions(test_set));
    std::cout << "trained " << spec_id(spec) << " on " << train_set.rows() << " rows\n";
    return 0;
  } catch (const std::exception& ex) {
    std::cerr << "reference adapter: " << ex.what() << "\n";
    return 1;
  }
}
