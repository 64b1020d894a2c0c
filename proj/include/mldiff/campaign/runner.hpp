#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mldiff/adapter/external.hpp"
#include "mldiff/adapter/registry.hpp"
#include "mldiff/campaign/config.hpp"
#include "mldiff/campaign/report.hpp"
#include "mldiff/classifiers/model.hpp"
#include "mldiff/dataset.hpp"
#include "mldiff/diffengine.hpp"

namespace mldiff::campaign {

struct RunOptions {
  std::size_t jobs = 1;
  std::filesystem::path work_root = adapter::default_work_root();
};

/// Family label of a participant, as used by the per-group summary.
inline std::string participant_group(const Participant& p) {
  if (p.spec) return adapter::registry_view(*p.spec).first;
  if (!p.external->params.family.empty()) return p.external->params.family;
  return "external";
}

inline std::string pair_group(const PairSpec& pair) {
  const auto a = participant_group(pair.a), b = participant_group(pair.b);
  return a == b ? a : a + "/" + b;
}

namespace detail {

inline std::pair<PartitionPredictions, PartitionPredictions> predict(const Participant& p, const SplitDataset& split,
                                                                     const RunOptions& opt) {
  if (p.external) {
    auto ext = adapter::run_external(p.external->adapter, split, p.external->params, opt.work_root);
    return {std::move(ext.train), std::move(ext.test)};
  }
  const auto model = train(*p.spec, split.train);
  return {predict_partition(model, split.train), predict_partition(model, split.test)};
}

}  // namespace detail

/// Runs every pair on every dataset. Records come out sorted by
/// (pair id, dataset, partition) whatever the degree of parallelism.
/// Adapter failures become errored records; anything else aborts the run.
inline CampaignReport run_campaign(const CampaignConfig& cfg, const RunOptions& opt = {}) {
  cfg.engine.validate();
  std::vector<SplitDataset> splits;
  splits.reserve(cfg.datasets.size());
  for (const auto& recipe : cfg.datasets) splits.push_back(split_half(materialize(recipe), cfg.split_seed));

  const std::size_t tasks = cfg.pairs.size() * cfg.datasets.size();
  std::vector<ComparisonRecord> records(2 * tasks);
  mldiff::detail::parallel_for(tasks, opt.jobs, [&](std::size_t t) {
    const auto& pair = cfg.pairs[t / cfg.datasets.size()];
    const auto d = t % cfg.datasets.size();
    const auto& split = splits[d];
    ComparisonRecord base;
    base.pair_id = pair.id;
    base.group = pair_group(pair);
    base.dataset = cfg.datasets[d].name.empty() ? recipe_name(cfg.datasets[d]) : cfg.datasets[d].name;
    ComparisonRecord train_rec = base, test_rec = base;
    train_rec.partition = "train";
    test_rec.partition = "test";
    try {
      const auto [a_train, a_test] = detail::predict(pair.a, split, opt);
      const auto [b_train, b_test] = detail::predict(pair.b, split, opt);
      const auto outcome = run_diff(a_train, a_test, b_train, b_test, cfg.engine);
      const auto verdict = evaluate_verdict(outcome, cfg.engine);
      train_rec.outcome = outcome.train;
      test_rec.outcome = outcome.test;
      train_rec.verdict = verdict.train;
      test_rec.verdict = verdict.test;
      train_rec.scores_compared = test_rec.scores_compared = outcome.scores_compared;
    } catch (const AdapterError& ex) {
      for (auto* r : {&train_rec, &test_rec}) {
        r->errored = true;
        r->error = ex.what();
        r->outcome = {};
        r->outcome.n = r == &train_rec ? split.train.rows() : split.test.rows();
        r->verdict = {Check::not_applicable, Check::not_applicable, Check::not_applicable, Check::not_applicable};
      }
    }
    records[2 * t] = std::move(train_rec);
    records[2 * t + 1] = std::move(test_rec);
  });
  std::sort(records.begin(), records.end(), record_less);

  CampaignReport report;
  report.engine = cfg.engine;
  report.split_seed = cfg.split_seed;
  report.records = std::move(records);
  report.aggregates = aggregate(report.records, cfg.engine.alpha);

  if (cfg.replicates) {
    for (const auto& pair : cfg.pairs) {
      if (pair.a.external || pair.b.external) continue;  // repeated sampling is in-process only
      for (const auto& recipe : cfg.datasets) {
        const auto s = repeated_diff(*pair.a.spec, *pair.b.spec, recipe, *cfg.replicates,
                                     recipe.kind == DatasetRecipe::Kind::csv ? cfg.split_seed : recipe.seed,
                                     cfg.engine, opt.jobs);
        report.replicate_summaries.push_back({pair.id, recipe.name.empty() ? recipe_name(recipe) : recipe.name,
                                              s.replicates, s.class_significant_train, s.class_significant_test,
                                              s.score_significant_train, s.score_significant_test});
      }
    }
    std::sort(report.replicate_summaries.begin(), report.replicate_summaries.end(),
              [](const auto& x, const auto& y) { return std::tie(x.pair_id, x.dataset) < std::tie(y.pair_id, y.dataset); });
  }
  check_consistency(report);
  return report;
}

}  // namespace mldiff::campaign
