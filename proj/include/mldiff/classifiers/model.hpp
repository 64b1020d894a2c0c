#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>

#include "mldiff/classifiers/dummy.hpp"
#include "mldiff/classifiers/forest.hpp"
#include "mldiff/classifiers/knn.hpp"
#include "mldiff/classifiers/logistic.hpp"
#include "mldiff/classifiers/naive_bayes.hpp"
#include "mldiff/classifiers/scores.hpp"
#include "mldiff/classifiers/spec.hpp"
#include "mldiff/dataset.hpp"

namespace mldiff {

using classifiers::Scores;

/// The pair (f, f_score) produced by training a variant. Immutable; copies
/// share the fitted state, and concurrent prediction is safe.
class TrainedModel {
 public:
  using Fitted = std::variant<classifiers::ConstantClassifier, classifiers::GaussianNB, classifiers::MultinomialNB,
                              classifiers::KNearestNeighbors, classifiers::LogisticModel,
                              classifiers::DummyClassifier, classifiers::RandomForest>;

  TrainedModel(ClassifierSpec spec, Fitted fitted, std::uint64_t trained_on)
      : spec_(std::move(spec)), fitted_(std::make_shared<const Fitted>(std::move(fitted))), trained_on_(trained_on) {}

  const ClassifierSpec& spec() const noexcept { return spec_; }
  /// Every in-repo variant produces probability scores.
  bool scores_available() const noexcept { return true; }
  /// Fingerprint of the training data (Dataset::fingerprint).
  std::uint64_t trained_on() const noexcept { return trained_on_; }

  int predict(std::span<const double> x) const {
    return std::visit([&](const auto& m) { return m.predict(x); }, *fitted_);
  }
  Scores scores(std::span<const double> x) const {
    return std::visit([&](const auto& m) { return m.scores(x); }, *fitted_);
  }

  const Fitted& fitted() const noexcept { return *fitted_; }

 private:
  ClassifierSpec spec_;
  std::shared_ptr<const Fitted> fitted_;
  std::uint64_t trained_on_ = 0;
};

/// Checks the data-dependent preconditions of `spec` on a training set
/// (k <= n for KNN, non-negative features for MNB).
inline void check_trainable(const ClassifierSpec& spec, const Dataset& train) {
  if (spec.family == Family::KNN) {
    const auto k = spec.hyperparameters.get_int("k");
    if (k < 1 || static_cast<std::size_t>(k) > train.rows()) {
      throw InvalidArgument(spec.variant + ": k = " + std::to_string(k) + " exceeds training size " +
                            std::to_string(train.rows()));
    }
  }
  if (spec.family == Family::MNB) {
    for (double v : train.features()) {
      if (v < 0) throw InvalidArgument("mnb: training features must be non-negative");
    }
  }
}

inline TrainedModel train(const ClassifierSpec& spec, const Dataset& data) {
  using namespace classifiers;
  check_trainable(spec, data);
  const auto fp = data.fingerprint();
  if (data.degenerate()) return TrainedModel(spec, ConstantClassifier(data.label(0)), fp);

  const auto& hp = spec.hyperparameters;
  const auto& v = spec.variant;
  switch (spec.family) {
    case Family::GNB: {
      const GaussianOptions opt = v == "gnb-a" ? GaussianOptions{1, Accumulation::log_space}
                                               : GaussianOptions{0, Accumulation::linear_space};
      return TrainedModel(spec, GaussianNB::fit(data, opt), fp);
    }
    case Family::MNB:
      return TrainedModel(spec, MultinomialNB::fit(data, hp.get_real("laplace_alpha")), fp);
    case Family::KNN:
      return TrainedModel(spec,
                          KNearestNeighbors::fit(data, static_cast<std::size_t>(hp.get_int("k")),
                                                 v == "knn-a" ? KnnTieRule::variant_a : KnnTieRule::variant_b),
                          fp);
    case Family::LR: {
      LogisticOptions opt;
      opt.penalty = parse_penalty(hp.get_string("penalty"));
      opt.alpha = hp.get_real("alpha");
      opt.max_iter = static_cast<int>(hp.get_int("max_iter"));
      const LogisticProblem problem(data);
      auto fit = v == "lr-irls" ? fit_irls(problem, opt) : fit_gradient_descent(problem, opt);
      return TrainedModel(spec, LogisticModel(std::move(fit)), fp);
    }
    case Family::DUMMY:
      return TrainedModel(spec,
                          DummyClassifier::fit(data, v == "dummy-prior" ? DummyClassifier::Scoring::prior
                                                                        : DummyClassifier::Scoring::hard),
                          fp);
    case Family::RF: {
      ForestOptions opt;
      opt.n_trees = static_cast<std::size_t>(hp.get_int("n_trees"));
      opt.max_features = static_cast<std::size_t>(hp.get_int("max_features"));
      if (hp.has("max_depth")) opt.max_depth = static_cast<std::size_t>(hp.get_int("max_depth"));
      opt.seed = spec.train_seed.value_or(0);
      return TrainedModel(spec, RandomForest::fit(data, opt), fp);
    }
  }
  throw InvalidArgument("unsupported variant '" + v + "'");
}

}  // namespace mldiff
