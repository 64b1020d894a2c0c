#pragma once

#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mldiff/adapter/registry.hpp"
#include "mldiff/campaign/config.hpp"
#include "mldiff/campaign/report.hpp"
#include "mldiff/campaign/runner.hpp"
#include "mldiff/csv.hpp"
#include "mldiff/diffengine.hpp"
#include "mldiff/recipe.hpp"

namespace mldiff::campaign {

namespace detail {

inline std::string fmt_p(const std::optional<double>& p) {
  if (!p) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", *p);
  return buf;
}

inline void print_outcome(std::ostream& out, const DiffOutcome& o, const Verdict& v) {
  out << "partition  n      delta  delta_score  p_ks        p_chi2      exact_classes  exact_scores  dist_scores  dist_classes\n";
  auto row = [&](const char* name, const PartitionOutcome& p, const PartitionVerdict& pv) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-9s  %-5zu  %-5zu  %-11s  %-10s  %-10s  %-13s  %-12s  %-11s  %s\n", name, p.n,
                  p.delta, p.delta_score ? std::to_string(*p.delta_score).c_str() : "n/a", fmt_p(p.p_ks).c_str(),
                  fmt_p(p.p_chi2).c_str(), to_string(pv.exact_classes), to_string(pv.exact_scores),
                  to_string(pv.dist_scores), to_string(pv.dist_classes));
    out << buf;
  };
  row("train", o.train, v.train);
  row("test", o.test, v.test);
}

inline std::set<std::string> parse_formats(const std::string& s) {
  std::set<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item == "md") item = "markdown";
    if (!item.empty()) out.insert(item);
  }
  return out;
}

}  // namespace detail

/// Entry point of the `mldiff` tool. Returns 0 on success, 1 on any
/// validation or runtime error, 2 when a campaign ran but an adapter failed.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Differential testing of binary classifiers"};
  app.require_subcommand(1);

  EngineConfig engine;
  auto add_engine = [&](CLI::App* sub) {
    sub->add_option("--tolerance", engine.score_tolerance, "score tolerance")->capture_default_str();
    sub->add_option("--alpha", engine.alpha, "significance level")->capture_default_str();
    sub->add_flag("--yates", engine.yates_correction, "Yates continuity correction for chi-squared");
  };

  std::string config_path, out_dir, formats = "json,csv,markdown";
  std::size_t jobs = 1;
  auto* run = app.add_subcommand("run", "run a campaign from a JSON config");
  run->add_option("--config", config_path, "campaign config")->required();
  run->add_option("--out", out_dir, "output directory (overrides the config)");
  run->add_option("--jobs", jobs, "parallel comparisons")->check(CLI::PositiveNumber);
  run->add_option("--formats", formats, "comma-separated subset of json,csv,markdown")->capture_default_str();

  std::string kind, gen_out;
  std::size_t n = 200, m = 10;
  std::uint64_t seed = 0;
  auto* gen = app.add_subcommand("gen", "write a generated dataset as CSV");
  gen->add_option("--kind", kind, "uniform or random")->required()->check(CLI::IsMember({"uniform", "random"}));
  gen->add_option("--n", n, "rows (even)")->capture_default_str();
  gen->add_option("--m", m, "features")->capture_default_str();
  gen->add_option("--seed", seed, "generator seed")->capture_default_str();
  gen->add_option("--out", gen_out, "output CSV")->required();

  std::string spec_a, spec_b, dataset;
  auto* diff = app.add_subcommand("diff", "compare two variants on one dataset");
  diff->add_option("--a", spec_a, "first classifier spec, e.g. rf:seed=1")->required();
  diff->add_option("--b", spec_b, "second classifier spec")->required();
  diff->add_option("--dataset", dataset, "recipe: uniform:n=200,m=10,seed=1 | random:... | csv:path=... | bc | wine")
      ->required();
  diff->add_option("--seed", seed, "split seed")->capture_default_str();
  add_engine(diff);

  std::string family, framework;
  std::vector<std::string> sets;
  std::string registry_path;
  auto* tr = app.add_subcommand("translate", "render canonical hyperparameters for a framework");
  tr->add_option("--family", family, "registry group, e.g. RIDGE")->required();
  tr->add_option("--framework", framework, "framework or framework:algorithm")->required();
  tr->add_option("--set", sets, "canonical key=value (repeatable)");
  tr->add_option("--registry", registry_path, "registry file (default: bundled)");

  std::string recipe;
  std::size_t replicates = 100;
  auto* rep = app.add_subcommand("repeat", "repeat a comparison over freshly sampled datasets");
  rep->add_option("--a", spec_a, "first classifier spec")->required();
  rep->add_option("--b", spec_b, "second classifier spec")->required();
  rep->add_option("--recipe", recipe, "dataset recipe")->required();
  rep->add_option("--replicates", replicates, "number of replicates")->check(CLI::PositiveNumber)->capture_default_str();
  rep->add_option("--seed", seed, "base seed")->capture_default_str();
  rep->add_option("--jobs", jobs, "parallel replicates")->check(CLI::PositiveNumber);
  add_engine(rep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n\n";
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return 1;
  }

  try {
    if (run->parsed()) {
      auto cfg = load_campaign(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      const auto report = run_campaign(cfg, RunOptions{jobs, adapter::default_work_root()});
      for (const auto& p : write_report(report, cfg.output_dir, detail::parse_formats(formats))) {
        out << "wrote " << p.string() << "\n";
      }
      const auto& a = report.aggregates;
      out << a.total_comparisons << " comparisons, " << a.class_deviation_count << " with class deviations, "
          << a.class_significant_count << " significant; " << a.errored << " errored\n";
      return a.errored ? 2 : 0;
    }
    if (gen->parsed()) {
      const auto d = kind == "uniform" ? generate_uniform(n, m, seed) : generate_random(n, m, seed);
      write_dataset_csv(gen_out, d);
      out << "wrote " << d.rows() << " rows to " << gen_out << "\n";
      return 0;
    }
    if (diff->parsed()) {
      const auto a = parse_spec(spec_a), b = parse_spec(spec_b);
      const auto data = materialize(parse_recipe(dataset));
      const auto split = split_half(data, seed);
      const auto outcome = run_diff(train(a, split.train), train(b, split.train), split, engine);
      out << spec_id(a) << " vs " << spec_id(b) << " on " << data.name() << " (split seed " << seed << ")\n";
      detail::print_outcome(out, outcome, evaluate_verdict(outcome, engine));
      return 0;
    }
    if (tr->parsed()) {
      const auto reg = registry_path.empty() ? adapter::Registry::builtin() : adapter::Registry::load(registry_path);
      CanonicalConfig cfg;
      for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got '" + s + "'");
        const auto key = s.substr(0, eq), value = s.substr(eq + 1);
        double x = 0;
        std::int64_t i = 0;
        auto res = std::from_chars(value.data(), value.data() + value.size(), i);
        if (res.ec == std::errc{} && res.ptr == value.data() + value.size()) {
          cfg.set(key, i);
        } else if (csv::parse_double(value, x)) {
          cfg.set(key, x);
        } else {
          cfg.set(key, value);
        }
      }
      const auto rendered = adapter::translate(cfg, family, framework, reg);
      out << rendered.framework << ":" << rendered.algorithm << "  " << rendered.render() << "\n";
      return 0;
    }
    if (rep->parsed()) {
      const auto a = parse_spec(spec_a), b = parse_spec(spec_b);
      const auto r = parse_recipe(recipe);
      const auto s = repeated_diff(a, b, r, replicates, seed, engine, jobs);
      out << spec_id(a) << " vs " << spec_id(b) << ", " << s.replicates << " replicates of " << recipe_name(r) << "\n";
      out << "significant class deviations: train " << format_double(s.class_significant_train) << ", test "
          << format_double(s.class_significant_test) << "\n";
      out << "significant score deviations: train " << format_double(s.score_significant_train) << ", test "
          << format_double(s.score_significant_test) << "\n";
      return 0;
    }
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace mldiff::campaign
