#pragma once

// Differential testing of two classifiers on one split: class deviations,
// score deviations, KS on class-1 scores and chi-squared on class counts,
// each evaluated on the training and the test partition.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mldiff/classifiers/model.hpp"
#include "mldiff/dataset.hpp"
#include "mldiff/error.hpp"
#include "mldiff/recipe.hpp"
#include "mldiff/rng.hpp"
#include "mldiff/stats.hpp"

namespace mldiff {

struct EngineConfig {
  double score_tolerance = 0.001;
  double alpha = 0.05;
  bool yates_correction = false;
  stats::KsMethod ks_method = stats::KsMethod::automatic;

  void validate() const {
    if (!(score_tolerance > 0) || !std::isfinite(score_tolerance)) {
      throw InvalidArgument("score_tolerance must be > 0");
    }
    if (!(alpha > 0 && alpha < 1)) throw InvalidArgument("alpha must lie in (0, 1)");
  }

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

/// Predictions of one model on one partition. `scores` is absent for models
/// that only report classes.
struct PartitionPredictions {
  std::vector<int> classes;
  std::optional<std::vector<Scores>> scores;
};

inline PartitionPredictions predict_partition(const TrainedModel& model, const Dataset& data) {
  PartitionPredictions out;
  out.classes.resize(data.rows());
  std::vector<Scores> scores(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    out.classes[i] = model.predict(data.row(i));
    scores[i] = model.scores(data.row(i));
  }
  if (model.scores_available()) out.scores = std::move(scores);
  return out;
}

struct PartitionOutcome {
  std::size_t n = 0;
  std::size_t delta = 0;
  std::optional<std::size_t> delta_score;
  std::optional<double> p_ks;
  std::optional<double> ks_statistic;
  double p_chi2 = 1.0;
  double chi2_statistic = 0.0;
  bool chi2_degenerate = false;

  friend bool operator==(const PartitionOutcome&, const PartitionOutcome&) = default;
};

struct DiffOutcome {
  PartitionOutcome train;
  PartitionOutcome test;
  bool scores_compared = false;

  friend bool operator==(const DiffOutcome&, const DiffOutcome&) = default;
};

/// True when two score vectors differ by at least `tolerance` in some class.
/// The comparison forgives a relative 1e-9 of the tolerance so that decimal
/// differences such as 0.301 - 0.3 are not lost to binary rounding.
inline bool score_deviates(const Scores& a, const Scores& b, double tolerance) {
  const double diff = std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
  return diff >= tolerance * (1.0 - 1e-9);
}

inline PartitionOutcome compare_partition(const PartitionPredictions& a, const PartitionPredictions& b,
                                          const EngineConfig& cfg) {
  cfg.validate();
  const std::size_t n = a.classes.size();
  if (n == 0) throw InvalidArgument("run_diff: partition is empty");
  if (b.classes.size() != n) {
    throw InvalidArgument("run_diff: prediction counts differ (" + std::to_string(n) + " vs " +
                          std::to_string(b.classes.size()) + ")");
  }
  PartitionOutcome out;
  out.n = n;
  stats::ClassCounts ca{0, 0}, cb{0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const int x = a.classes[i], y = b.classes[i];
    if ((x != 0 && x != 1) || (y != 0 && y != 1)) throw InvalidArgument("run_diff: class outside {0, 1}");
    out.delta += static_cast<std::size_t>(x != y);
    ++ca[static_cast<std::size_t>(x)];
    ++cb[static_cast<std::size_t>(y)];
  }
  const auto chi = stats::chi2_homogeneity_2x2(ca, cb, cfg.yates_correction);
  out.p_chi2 = chi.p_value;
  out.chi2_statistic = chi.statistic;
  out.chi2_degenerate = chi.degenerate;

  if (a.scores && b.scores) {
    if (a.scores->size() != n || b.scores->size() != n) {
      throw InvalidArgument("run_diff: score and class counts differ");
    }
    std::size_t dev = 0;
    std::vector<double> s1(n), s2(n);
    for (std::size_t i = 0; i < n; ++i) {
      dev += static_cast<std::size_t>(score_deviates((*a.scores)[i], (*b.scores)[i], cfg.score_tolerance));
      s1[i] = (*a.scores)[i][1];
      s2[i] = (*b.scores)[i][1];
    }
    out.delta_score = dev;
    const auto ks = stats::ks_two_sample(s1, s2, cfg.ks_method);
    out.p_ks = ks.p_value;
    out.ks_statistic = ks.statistic;
  }
  return out;
}

inline DiffOutcome run_diff(const PartitionPredictions& a_train, const PartitionPredictions& a_test,
                            const PartitionPredictions& b_train, const PartitionPredictions& b_test,
                            const EngineConfig& cfg = {}) {
  DiffOutcome out;
  out.train = compare_partition(a_train, b_train, cfg);
  out.test = compare_partition(a_test, b_test, cfg);
  out.scores_compared = out.train.delta_score.has_value() && out.test.delta_score.has_value();
  return out;
}

inline DiffOutcome run_diff(const TrainedModel& m1, const TrainedModel& m2, const SplitDataset& data,
                            const EngineConfig& cfg = {}) {
  const auto fp = data.train.fingerprint();
  for (const auto* m : {&m1, &m2}) {
    if (m->trained_on() != fp) {
      throw InvalidArgument("run_diff: model '" + spec_id(m->spec()) + "' was not trained on '" +
                            data.train.name() + "'");
    }
  }
  return run_diff(predict_partition(m1, data.train), predict_partition(m1, data.test),
                  predict_partition(m2, data.train), predict_partition(m2, data.test), cfg);
}

enum class Check { pass, fail, not_applicable };

inline const char* to_string(Check c) {
  switch (c) {
    case Check::pass: return "pass";
    case Check::fail: return "fail";
    case Check::not_applicable: return "n/a";
  }
  return "?";
}

struct PartitionVerdict {
  Check exact_classes = Check::pass;
  Check exact_scores = Check::not_applicable;
  Check dist_scores = Check::not_applicable;
  Check dist_classes = Check::pass;

  friend bool operator==(const PartitionVerdict&, const PartitionVerdict&) = default;
};

struct Verdict {
  PartitionVerdict train;
  PartitionVerdict test;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

inline PartitionVerdict evaluate_partition(const PartitionOutcome& o, const EngineConfig& cfg) {
  auto check = [](bool ok) { return ok ? Check::pass : Check::fail; };
  PartitionVerdict v;
  v.exact_classes = check(o.delta == 0);
  v.dist_classes = check(o.p_chi2 >= cfg.alpha);
  if (o.delta_score) v.exact_scores = check(*o.delta_score == 0);
  if (o.p_ks) v.dist_scores = check(*o.p_ks >= cfg.alpha);
  return v;
}

inline Verdict evaluate_verdict(const DiffOutcome& o, const EngineConfig& cfg = {}) {
  cfg.validate();
  Verdict v{evaluate_partition(o.train, cfg), evaluate_partition(o.test, cfg)};
  if (!o.scores_compared) {
    for (auto* p : {&v.train, &v.test}) p->exact_scores = p->dist_scores = Check::not_applicable;
  }
  return v;
}

namespace detail {

/// Runs fn(0..count-1) on up to `jobs` threads; the first exception is rethrown.
inline void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

struct ReplicateSummary {
  std::size_t replicates = 0;
  // Fraction of replicates whose chi-squared test on class counts was significant.
  double class_significant_train = 0.0;
  double class_significant_test = 0.0;
  // Same for KS on scores, over replicates where scores were compared.
  double score_significant_train = 0.0;
  double score_significant_test = 0.0;
  std::vector<std::uint64_t> dataset_seeds;
  std::vector<std::uint64_t> split_seeds;
  std::vector<DiffOutcome> outcomes;
  std::vector<Verdict> verdicts;
};

/// Split seed used by replicate r (and by single comparisons on a recipe).
inline std::uint64_t replicate_split_seed(std::uint64_t dataset_seed) { return derive_seed(dataset_seed, 1); }

/// Repeats run_diff over `replicates` datasets: replicate r materializes the
/// recipe with seed base_seed + r (generated recipes) and splits it with
/// replicate_split_seed(base_seed + r). CSV recipes only vary the split.
inline ReplicateSummary repeated_diff(const ClassifierSpec& spec1, const ClassifierSpec& spec2,
                                      const DatasetRecipe& recipe, std::size_t replicates,
                                      std::uint64_t base_seed, const EngineConfig& cfg = {},
                                      std::size_t jobs = 1) {
  if (replicates == 0) throw InvalidArgument("repeated_diff: replicates must be >= 1");
  cfg.validate();
  ReplicateSummary s;
  s.replicates = replicates;
  s.dataset_seeds.resize(replicates);
  s.split_seeds.resize(replicates);
  s.outcomes.resize(replicates);
  s.verdicts.resize(replicates);
  std::optional<Dataset> fixed;
  if (recipe.kind == DatasetRecipe::Kind::csv) fixed = materialize(recipe);

  detail::parallel_for(replicates, jobs, [&](std::size_t r) {
    const std::uint64_t seed = base_seed + r;
    DatasetRecipe rr = recipe;
    rr.seed = seed;
    const Dataset data = fixed ? *fixed : materialize(rr);
    const auto split = split_half(data, replicate_split_seed(seed));
    const auto m1 = train(spec1, split.train);
    const auto m2 = train(spec2, split.train);
    s.dataset_seeds[r] = seed;
    s.split_seeds[r] = split.split_seed;
    s.outcomes[r] = run_diff(m1, m2, split, cfg);
    s.verdicts[r] = evaluate_verdict(s.outcomes[r], cfg);
  });

  std::size_t ct = 0, ce = 0, st = 0, se = 0, scored = 0;
  for (const auto& v : s.verdicts) {
    ct += v.train.dist_classes == Check::fail;
    ce += v.test.dist_classes == Check::fail;
    if (v.train.dist_scores != Check::not_applicable) {
      ++scored;
      st += v.train.dist_scores == Check::fail;
      se += v.test.dist_scores == Check::fail;
    }
  }
  const auto frac = [](std::size_t k, std::size_t n) { return n ? static_cast<double>(k) / static_cast<double>(n) : 0.0; };
  s.class_significant_train = frac(ct, replicates);
  s.class_significant_test = frac(ce, replicates);
  s.score_significant_train = frac(st, scored);
  s.score_significant_test = frac(se, scored);
  return s;
}

}  // namespace mldiff
