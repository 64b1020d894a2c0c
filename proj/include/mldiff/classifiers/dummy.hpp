#pragma once

#include <span>

#include "mldiff/classifiers/scores.hpp"
#include "mldiff/dataset.hpp"

namespace mldiff::classifiers {

/// Majority-class predictor (ties -> class 0). The two score conventions
/// differ: empirical priors versus a one-hot vector for the majority class.
class DummyClassifier {
 public:
  enum class Scoring { prior, hard };

  static DummyClassifier fit(const Dataset& d, Scoring scoring) {
    DummyClassifier model;
    const double n = static_cast<double>(d.rows());
    model.prior_ = {static_cast<double>(d.count(0)) / n, static_cast<double>(d.count(1)) / n};
    model.majority_ = d.count(1) > d.count(0) ? 1 : 0;
    model.scoring_ = scoring;
    return model;
  }

  Scores scores(std::span<const double>) const {
    if (scoring_ == Scoring::prior) return prior_;
    return majority_ == 1 ? Scores{0.0, 1.0} : Scores{1.0, 0.0};
  }
  int predict(std::span<const double>) const { return majority_; }

 private:
  Scores prior_{0.5, 0.5};
  int majority_ = 0;
  Scoring scoring_ = Scoring::prior;
};

/// Used for every family when the training data holds a single class.
class ConstantClassifier {
 public:
  explicit ConstantClassifier(int cls) : cls_(cls) {}
  Scores scores(std::span<const double>) const { return cls_ == 1 ? Scores{0.0, 1.0} : Scores{1.0, 0.0}; }
  int predict(std::span<const double>) const { return cls_; }

 private:
  int cls_ = 0;
};

}  // namespace mldiff::classifiers
