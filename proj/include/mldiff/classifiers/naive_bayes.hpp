#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "mldiff/classifiers/scores.hpp"
#include "mldiff/dataset.hpp"
#include "mldiff/error.hpp"

namespace mldiff::classifiers {

enum class Accumulation { log_space, linear_space };

struct GaussianOptions {
  int variance_ddof = 1;  // divisor n_c - ddof
  Accumulation accumulation = Accumulation::log_space;
};

/// Gaussian Naive Bayes. gnb-a = {ddof 1, log space}, gnb-b = {ddof 0, linear space}.
class GaussianNB {
 public:
  static GaussianNB fit(const Dataset& d, GaussianOptions opt) {
    GaussianNB model;
    model.opt_ = opt;
    const std::size_t n = d.rows(), m = d.cols();
    model.m_ = m;
    for (int c = 0; c < 2; ++c) {
      model.mean_[c].assign(m, 0.0);
      model.var_[c].assign(m, 0.0);
      model.count_[c] = d.count(c);
      model.prior_[c] = static_cast<double>(model.count_[c]) / static_cast<double>(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto& mu = model.mean_[d.label(i)];
      for (std::size_t j = 0; j < m; ++j) mu[j] += d.at(i, j);
    }
    for (int c = 0; c < 2; ++c) {
      if (model.count_[c] == 0) continue;
      for (auto& v : model.mean_[c]) v /= static_cast<double>(model.count_[c]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int c = d.label(i);
      for (std::size_t j = 0; j < m; ++j) {
        const double dev = d.at(i, j) - model.mean_[c][j];
        model.var_[c][j] += dev * dev;
      }
    }
    for (int c = 0; c < 2; ++c) {
      const auto nc = static_cast<double>(model.count_[c]);
      const double divisor = nc - opt.variance_ddof;
      for (auto& v : model.var_[c]) v = divisor > 0 ? v / divisor : 0.0;
    }

    // Smoothing: 1e-9 times the largest feature variance of the whole set.
    double largest = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += d.at(i, j);
      mean /= static_cast<double>(n);
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) ss += (d.at(i, j) - mean) * (d.at(i, j) - mean);
      largest = std::max(largest, ss / static_cast<double>(n));
    }
    model.epsilon_ = largest > 0 ? 1e-9 * largest : 1e-9;
    for (int c = 0; c < 2; ++c) {
      for (auto& v : model.var_[c]) v += model.epsilon_;
    }
    return model;
  }

  Scores scores(std::span<const double> x) const {
    return opt_.accumulation == Accumulation::log_space ? log_scores(x) : linear_scores(x);
  }

  int predict(std::span<const double> x) const {
    const Scores s = scores(x);
    if (s[0] == s[1]) return prior_[1] > prior_[0] ? 1 : 0;
    return s[1] > s[0] ? 1 : 0;
  }

  const std::vector<double>& means(int c) const noexcept { return mean_[c]; }
  const std::vector<double>& variances(int c) const noexcept { return var_[c]; }
  double prior(int c) const noexcept { return prior_[c]; }
  double epsilon() const noexcept { return epsilon_; }

 private:
  Scores log_scores(std::span<const double> x) const {
    std::array<double, 2> ll{};
    for (int c = 0; c < 2; ++c) {
      if (count_[c] == 0) {
        ll[c] = -std::numeric_limits<double>::infinity();
        continue;
      }
      double acc = std::log(prior_[c]);
      for (std::size_t j = 0; j < m_; ++j) {
        const double dev = x[j] - mean_[c][j];
        acc += -0.5 * std::log(2.0 * std::numbers::pi * var_[c][j]) - dev * dev / (2.0 * var_[c][j]);
      }
      ll[c] = acc;
    }
    return normalize_log(ll);
  }

  // Products in linear space; each class total is clamped to the normal range.
  // If both classes hit the same bound the result is (0.5, 0.5) and predict()
  // falls back to the prior-majority class.
  Scores linear_scores(std::span<const double> x) const {
    constexpr double lo = std::numeric_limits<double>::min();
    constexpr double hi = std::numeric_limits<double>::max();
    std::array<double, 2> u{};
    std::array<int, 2> clamped{};  // -1 below, +1 above
    for (int c = 0; c < 2; ++c) {
      if (count_[c] == 0) {
        u[c] = 0.0;
        continue;
      }
      double acc = prior_[c];
      for (std::size_t j = 0; j < m_; ++j) {
        const double dev = x[j] - mean_[c][j];
        acc *= std::exp(-dev * dev / (2.0 * var_[c][j])) / std::sqrt(2.0 * std::numbers::pi * var_[c][j]);
      }
      if (!(acc >= lo)) {
        acc = lo;
        clamped[c] = -1;
      } else if (acc > hi) {
        acc = hi;
        clamped[c] = 1;
      }
      u[c] = acc;
    }
    if (count_[0] == 0 || count_[1] == 0) return count_[1] == 0 ? Scores{1.0, 0.0} : Scores{0.0, 1.0};
    if (clamped[0] != 0 && clamped[0] == clamped[1]) return {0.5, 0.5};
    // ratio form: u[0] + u[1] may overflow when both are near the upper bound
    if (u[0] >= u[1]) {
      const double r = u[1] / u[0];
      return {1.0 / (1.0 + r), r / (1.0 + r)};
    }
    const double r = u[0] / u[1];
    return {r / (1.0 + r), 1.0 / (1.0 + r)};
  }

  GaussianOptions opt_;
  std::size_t m_ = 0;
  std::array<std::size_t, 2> count_{};
  std::array<double, 2> prior_{};
  std::array<std::vector<double>, 2> mean_;
  std::array<std::vector<double>, 2> var_;
  double epsilon_ = 0.0;
};

/// Multinomial Naive Bayes with additive (Laplace) smoothing, applied to
/// real-valued non-negative features as-is.
class MultinomialNB {
 public:
  static MultinomialNB fit(const Dataset& d, double laplace_alpha) {
    if (laplace_alpha < 0) throw InvalidArgument("mnb: laplace_alpha must be >= 0");
    for (double v : d.features()) {
      if (v < 0) throw InvalidArgument("mnb: features must be non-negative");
    }
    MultinomialNB model;
    const std::size_t n = d.rows(), m = d.cols();
    model.m_ = m;
    std::array<std::vector<double>, 2> totals{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
      auto& t = totals[d.label(i)];
      for (std::size_t j = 0; j < m; ++j) t[j] += d.at(i, j);
    }
    for (int c = 0; c < 2; ++c) {
      model.count_[c] = d.count(c);
      model.log_prior_[c] = std::log(static_cast<double>(model.count_[c]) / static_cast<double>(n));
      double sum = 0.0;
      for (double t : totals[c]) sum += t;
      const double denom = sum + laplace_alpha * static_cast<double>(m);
      model.log_theta_[c].resize(m);
      for (std::size_t j = 0; j < m; ++j) {
        // denom == 0 only for alpha == 0 with all-zero class rows; theta is then undefined (-inf).
        model.log_theta_[c][j] = denom > 0 ? std::log((totals[c][j] + laplace_alpha) / denom)
                                           : -std::numeric_limits<double>::infinity();
      }
    }
    return model;
  }

  Scores scores(std::span<const double> x) const {
    std::array<double, 2> ll{};
    for (int c = 0; c < 2; ++c) {
      double acc = log_prior_[c];
      for (std::size_t j = 0; j < m_; ++j) {
        if (x[j] != 0.0) acc += x[j] * log_theta_[c][j];
      }
      ll[c] = acc;
    }
    return normalize_log(ll);
  }

  int predict(std::span<const double> x) const { return argmax_low(scores(x)); }

 private:
  std::size_t m_ = 0;
  std::array<std::size_t, 2> count_{};
  std::array<double, 2> log_prior_{};
  std::array<std::vector<double>, 2> log_theta_;
};

}  // namespace mldiff::classifiers
