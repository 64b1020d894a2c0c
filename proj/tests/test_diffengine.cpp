#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mldiff/diffengine.hpp"
#include "mldiff/recipe.hpp"
#include "mldiff/rng.hpp"

using namespace mldiff;

namespace {

// Predictions from class-1 scores, class by argmax with ties to 0.
PartitionPredictions from_scores(const std::vector<double>& s1) {
  PartitionPredictions p;
  std::vector<Scores> s;
  for (double v : s1) {
    s.push_back({1.0 - v, v});
    p.classes.push_back(v > 0.5 ? 1 : 0);
  }
  p.scores = std::move(s);
  return p;
}

PartitionPredictions classes_only(std::vector<int> c) { return {std::move(c), std::nullopt}; }

std::vector<double> random_scores(Xoshiro256ss& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform();
  return v;
}

}  // namespace

TEST(ScoreDeviation, ToleranceBoundary) {
  const auto a = from_scores({0.3, 0.3, 0.3, 0.3});
  const auto b = from_scores({0.3009, 0.3010, 0.2991, 0.2990});
  const auto o = compare_partition(a, b, {});
  EXPECT_EQ(*o.delta_score, 2u);
  EXPECT_FALSE(score_deviates({0.7, 0.3}, {0.6991, 0.3009}, 0.001));
  EXPECT_TRUE(score_deviates({0.7, 0.3}, {0.699, 0.301}, 0.001));
}

TEST(ScoreDeviation, NearHalfFlipsClassButNotScore) {
  const auto a = from_scores({0.4996}), b = from_scores({0.5004});
  const auto o = compare_partition(a, b, {});
  EXPECT_EQ(o.delta, 1u);
  EXPECT_EQ(*o.delta_score, 0u);
}

TEST(ComparePartition, Errors) {
  EXPECT_THROW(compare_partition(classes_only({}), classes_only({}), {}), InvalidArgument);
  EXPECT_THROW(compare_partition(classes_only({0, 1}), classes_only({0}), {}), InvalidArgument);
  EngineConfig bad;
  bad.alpha = 1.0;
  EXPECT_THROW(compare_partition(classes_only({0}), classes_only({0}), bad), InvalidArgument);
  bad = {};
  bad.score_tolerance = 0.0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(ComparePartition, MissingScoresLeaveScoreFieldsAbsent) {
  const auto a = from_scores({0.2, 0.8, 0.9});
  const auto b = classes_only({0, 1, 0});
  const auto o = compare_partition(a, b, {});
  EXPECT_EQ(o.delta, 1u);
  EXPECT_FALSE(o.delta_score);
  EXPECT_FALSE(o.p_ks);
  const auto d = run_diff(a, a, a, b, {});
  EXPECT_FALSE(d.scores_compared);
  const auto v = evaluate_verdict(d);
  EXPECT_EQ(v.test.exact_scores, Check::not_applicable);
  EXPECT_EQ(v.test.dist_scores, Check::not_applicable);
  EXPECT_EQ(v.test.exact_classes, Check::fail);
  EXPECT_EQ(v.train.exact_classes, Check::pass);
}

TEST(ComparePartition, SymmetricAndDeltaZeroMeansChi2One) {
  Xoshiro256ss rng(4);
  for (int t = 0; t < 50; ++t) {
    const auto s1 = random_scores(rng, 60);
    auto s2 = s1;
    for (auto& v : s2) {
      if (rng.uniform() < 0.3) v = std::clamp(v + 0.1 * (rng.uniform() - 0.5), 0.0, 1.0);
    }
    const auto a = from_scores(s1), b = from_scores(s2);
    const auto ab = compare_partition(a, b, {}), ba = compare_partition(b, a, {});
    EXPECT_EQ(ab, ba);
    if (ab.delta == 0) EXPECT_EQ(ab.p_chi2, 1.0);
    const auto self = compare_partition(a, a, {});
    EXPECT_EQ(self.delta, 0u);
    EXPECT_EQ(*self.delta_score, 0u);
    EXPECT_EQ(*self.p_ks, 1.0);
    EXPECT_EQ(self.p_chi2, 1.0);
  }
}

TEST(ComparePartition, DeltaScoreMonotoneInTolerance) {
  Xoshiro256ss rng(12);
  const auto a = from_scores(random_scores(rng, 200)), b = from_scores(random_scores(rng, 200));
  std::size_t previous = 201;
  for (double tol : {1e-6, 1e-4, 1e-3, 0.01, 0.1, 0.3, 0.9, 1.0}) {
    EngineConfig cfg;
    cfg.score_tolerance = tol;
    const auto d = *compare_partition(a, b, cfg).delta_score;
    EXPECT_LE(d, previous);
    previous = d;
  }
}

TEST(EvaluateVerdict, Examples) {
  DiffOutcome o;
  o.train.n = o.test.n = 100;
  o.train.p_chi2 = o.test.p_chi2 = 1.0;
  o.train.delta_score = o.test.delta_score = 0u;
  o.train.p_ks = o.test.p_ks = 1.0;
  o.scores_compared = true;
  auto v = evaluate_verdict(o);
  for (const auto* p : {&v.train, &v.test}) {
    EXPECT_EQ(p->exact_classes, Check::pass);
    EXPECT_EQ(p->exact_scores, Check::pass);
    EXPECT_EQ(p->dist_scores, Check::pass);
    EXPECT_EQ(p->dist_classes, Check::pass);
  }
  o.test.delta = 40;
  o.test.p_chi2 = 0.004;
  v = evaluate_verdict(o);
  EXPECT_EQ(v.test.exact_classes, Check::fail);
  EXPECT_EQ(v.test.dist_classes, Check::fail);
  EXPECT_EQ(v.train.dist_classes, Check::pass);
  // equality at alpha passes
  o.test.p_chi2 = 0.05;
  EXPECT_EQ(evaluate_verdict(o).test.dist_classes, Check::pass);
  EXPECT_STREQ(to_string(Check::not_applicable), "n/a");
}

TEST(RunDiff, SelfComparisonOnModels) {
  const auto split = split_half(materialize(uniform_recipe(200, 10, 1)), 5);
  const auto m = train(make_spec("gnb-a"), split.train);
  const auto o = run_diff(m, m, split);
  for (const auto* p : {&o.train, &o.test}) {
    EXPECT_EQ(p->delta, 0u);
    EXPECT_EQ(*p->delta_score, 0u);
    EXPECT_EQ(*p->p_ks, 1.0);
    EXPECT_EQ(p->p_chi2, 1.0);
  }
  EXPECT_TRUE(o.scores_compared);
}

TEST(RunDiff, DummyConventions) {
  const auto split = split_half(materialize(uniform_recipe(200, 10, 1)), 5);
  const auto o = run_diff(train(make_spec("dummy-prior"), split.train), train(make_spec("dummy-hard"), split.train),
                          split);
  EXPECT_EQ(o.train.delta, 0u);
  EXPECT_EQ(o.test.delta, 0u);
  EXPECT_EQ(*o.train.delta_score, 100u);
  EXPECT_EQ(*o.test.delta_score, 100u);
  EXPECT_EQ(o.test.p_chi2, 1.0);
  EXPECT_TRUE(o.test.chi2_degenerate);
  EXPECT_LT(*o.test.p_ks, 0.05);
}

TEST(RunDiff, RejectsModelsTrainedElsewhere) {
  const auto split = split_half(materialize(uniform_recipe(200, 10, 1)), 5);
  const auto other = split_half(materialize(uniform_recipe(200, 10, 2)), 5);
  const auto m = train(make_spec("gnb-a"), split.train);
  const auto stranger = train(make_spec("gnb-a"), other.train);
  EXPECT_THROW(run_diff(m, stranger, split), InvalidArgument);
}

TEST(RepeatedDiff, IdenticalModelsNeverSignificant) {
  const auto s = repeated_diff(make_spec("gnb-a"), make_spec("gnb-a"), uniform_recipe(100, 5, 0), 20, 7);
  EXPECT_EQ(s.class_significant_train, 0.0);
  EXPECT_EQ(s.class_significant_test, 0.0);
  EXPECT_EQ(s.score_significant_test, 0.0);
  ASSERT_EQ(s.dataset_seeds.size(), 20u);
  for (std::size_t r = 0; r < 20; ++r) {
    EXPECT_EQ(s.dataset_seeds[r], 7 + r);
    EXPECT_EQ(s.split_seeds[r], replicate_split_seed(7 + r));
  }
}

TEST(RepeatedDiff, SingleReplicateMatchesDirectRun) {
  const auto a = parse_spec("rf:n_trees=10,seed=1"), b = parse_spec("rf:n_trees=10,seed=2");
  const auto recipe = uniform_recipe(200, 10, 0);
  const auto s = repeated_diff(a, b, recipe, 1, 40);
  auto r = recipe;
  r.seed = 40;
  const auto split = split_half(materialize(r), replicate_split_seed(40));
  const auto direct = run_diff(train(a, split.train), train(b, split.train), split);
  EXPECT_EQ(s.outcomes[0], direct);
  const auto v = evaluate_verdict(direct);
  EXPECT_EQ(s.class_significant_test, v.test.dist_classes == Check::fail ? 1.0 : 0.0);
  EXPECT_EQ(s.class_significant_train, v.train.dist_classes == Check::fail ? 1.0 : 0.0);
  EXPECT_THROW(repeated_diff(a, b, recipe, 0, 1), InvalidArgument);
}

TEST(RepeatedDiff, IndependentOfJobs) {
  const auto a = parse_spec("rf:n_trees=10,seed=1"), b = parse_spec("rf:n_trees=10,seed=2");
  const auto one = repeated_diff(a, b, uniform_recipe(100, 10, 0), 12, 3, {}, 1);
  const auto many = repeated_diff(a, b, uniform_recipe(100, 10, 0), 12, 3, {}, 5);
  EXPECT_EQ(one.outcomes, many.outcomes);
  EXPECT_EQ(one.class_significant_test, many.class_significant_test);
}

TEST(RepeatedDiff, CsvRecipeVariesOnlyTheSplit) {
  const auto s = repeated_diff(make_spec("knn-a"), make_spec("knn-b"), wine_recipe(), 3, 0);
  EXPECT_NE(s.split_seeds[0], s.split_seeds[1]);
  for (const auto& o : s.outcomes) {
    EXPECT_EQ(o.train.n + o.test.n, 178u);
  }
}
