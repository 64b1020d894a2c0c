#pragma once

// Binary logistic regression, two independent trainers over one objective:
//
//   L(b, w) = (1/n) sum_i [ log(1 + e^{z_i}) - y_i z_i ] + R(w),  z_i = b + w.x_i
//   R(w) = alpha/2 |w|^2 (ridge) | alpha |w|_1 (lasso) | 0 (none)
//
// The intercept b is never penalized and both trainers start from zero.

#include <cmath>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "mldiff/classifiers/scores.hpp"
#include "mldiff/dataset.hpp"
#include "mldiff/error.hpp"

namespace mldiff::classifiers {

enum class Penalty { none, ridge, lasso };

inline Penalty parse_penalty(const std::string& s) {
  if (s == "none") return Penalty::none;
  if (s == "ridge") return Penalty::ridge;
  if (s == "lasso") return Penalty::lasso;
  throw InvalidArgument("unknown penalty '" + s + "'");
}

struct LogisticOptions {
  Penalty penalty = Penalty::none;
  double alpha = 0.0;
  int max_iter = 10000;
  double tolerance = 1e-8;  // on the Euclidean norm of the parameter update
};

/// Fixed step for full-batch gradient descent on the mean loss
/// (equivalently 0.5 / n on the summed loss).
inline constexpr double gradient_descent_step = 0.5;

inline double softplus(double z) noexcept {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}
inline double sigmoid(double z) noexcept {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Design matrix with a leading intercept column, plus targets.
class LogisticProblem {
 public:
  explicit LogisticProblem(const Dataset& d)
      : x_(static_cast<Eigen::Index>(d.rows()), static_cast<Eigen::Index>(d.cols() + 1)),
        y_(static_cast<Eigen::Index>(d.rows())) {
    for (std::size_t i = 0; i < d.rows(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      x_(r, 0) = 1.0;
      for (std::size_t j = 0; j < d.cols(); ++j) x_(r, static_cast<Eigen::Index>(j + 1)) = d.at(i, j);
      y_(r) = d.label(i);
    }
  }

  Eigen::Index dim() const noexcept { return x_.cols(); }
  Eigen::Index rows() const noexcept { return x_.rows(); }

  double loss(const Eigen::VectorXd& theta, const LogisticOptions& opt) const {
    const Eigen::VectorXd z = x_ * theta;
    double nll = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) nll += softplus(z(i)) - y_(i) * z(i);
    return nll / static_cast<double>(rows()) + penalty(theta, opt);
  }

  /// Gradient of the smooth part (mean NLL, plus ridge when selected).
  Eigen::VectorXd smooth_gradient(const Eigen::VectorXd& theta, const LogisticOptions& opt) const {
    const Eigen::VectorXd z = x_ * theta;
    Eigen::VectorXd resid(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) resid(i) = sigmoid(z(i)) - y_(i);
    Eigen::VectorXd g = x_.transpose() * resid / static_cast<double>(rows());
    if (opt.penalty == Penalty::ridge) g.tail(dim() - 1) += opt.alpha * theta.tail(dim() - 1);
    return g;
  }

  /// Full gradient; for lasso the penalty contributes alpha * sign(w_j),
  /// which is only a gradient away from w_j = 0.
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta, const LogisticOptions& opt) const {
    Eigen::VectorXd g = smooth_gradient(theta, opt);
    if (opt.penalty == Penalty::lasso) {
      for (Eigen::Index j = 1; j < dim(); ++j) {
        g(j) += opt.alpha * static_cast<double>((theta(j) > 0) - (theta(j) < 0));
      }
    }
    return g;
  }

  /// Hessian of the smooth part: X' W X / n (+ alpha on the weight block).
  Eigen::MatrixXd hessian(const Eigen::VectorXd& theta, const LogisticOptions& opt) const {
    const Eigen::VectorXd z = x_ * theta;
    Eigen::VectorXd w(z.size());
    // sigma(z) * sigma(-z) stays positive where p(1 - p) would round to zero
    for (Eigen::Index i = 0; i < z.size(); ++i) w(i) = sigmoid(z(i)) * sigmoid(-z(i));
    Eigen::MatrixXd h = x_.transpose() * w.asDiagonal() * x_ / static_cast<double>(rows());
    if (opt.penalty == Penalty::ridge) {
      for (Eigen::Index j = 1; j < dim(); ++j) h(j, j) += opt.alpha;
    }
    return h;
  }

 private:
  static double penalty(const Eigen::VectorXd& theta, const LogisticOptions& opt) {
    const auto w = theta.tail(theta.size() - 1);
    switch (opt.penalty) {
      case Penalty::ridge: return 0.5 * opt.alpha * w.squaredNorm();
      case Penalty::lasso: return opt.alpha * w.lpNorm<1>();
      case Penalty::none: break;
    }
    return 0.0;
  }

  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
};

struct LogisticFit {
  Eigen::VectorXd params;  // intercept first
  int iterations = 0;
  bool converged = false;
  double loss = 0.0;
};

/// Full-batch gradient descent; lasso uses a proximal (soft-threshold) step.
inline LogisticFit fit_gradient_descent(const LogisticProblem& prob, const LogisticOptions& opt) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(prob.dim());
  LogisticFit fit;
  const double step = gradient_descent_step;
  for (int it = 1; it <= opt.max_iter; ++it) {
    Eigen::VectorXd next = theta - step * prob.smooth_gradient(theta, opt);
    if (opt.penalty == Penalty::lasso) {
      const double shrink = step * opt.alpha;
      for (Eigen::Index j = 1; j < next.size(); ++j) {
        const double v = next(j);
        next(j) = v > shrink ? v - shrink : (v < -shrink ? v + shrink : 0.0);
      }
    }
    const double change = (next - theta).norm();
    theta = std::move(next);
    fit.iterations = it;
    if (change < opt.tolerance) {
      fit.converged = true;
      break;
    }
  }
  fit.params = theta;
  fit.loss = prob.loss(theta, opt);
  return fit;
}

/// Iteratively reweighted least squares (Newton) with step halving.
inline LogisticFit fit_irls(const LogisticProblem& prob, const LogisticOptions& opt) {
  if (opt.penalty == Penalty::lasso) throw InvalidArgument("lr-irls does not support the lasso penalty");
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(prob.dim());
  double current = prob.loss(theta, opt);
  LogisticFit fit;
  for (int it = 1; it <= opt.max_iter; ++it) {
    fit.iterations = it;
    const Eigen::VectorXd grad = prob.smooth_gradient(theta, opt);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(prob.hessian(theta, opt));
    if (ldlt.info() != Eigen::Success) break;
    const Eigen::VectorXd delta = ldlt.solve(grad);
    if (!delta.allFinite()) break;

    // Halve until the objective decreases; separable data drives it to zero.
    double t = 1.0;
    bool moved = false;
    Eigen::VectorXd candidate;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      candidate = theta - t * delta;
      const double value = prob.loss(candidate, opt);
      if (value < current) {
        current = value;
        moved = true;
        break;
      }
    }
    const double change = t * delta.norm();
    if (!moved) {
      fit.converged = change < opt.tolerance || delta.norm() < opt.tolerance;
      break;
    }
    theta = std::move(candidate);
    if (change < opt.tolerance) {
      fit.converged = true;
      break;
    }
  }
  fit.params = theta;
  fit.loss = prob.loss(theta, opt);
  return fit;
}

class LogisticModel {
 public:
  explicit LogisticModel(LogisticFit fit) : fit_(std::move(fit)) {}

  Scores scores(std::span<const double> x) const {
    double z = fit_.params(0);
    for (std::size_t j = 0; j < x.size(); ++j) z += fit_.params(static_cast<Eigen::Index>(j + 1)) * x[j];
    const double p = sigmoid(z);
    return {1.0 - p, p};
  }
  int predict(std::span<const double> x) const { return argmax_low(scores(x)); }

  const LogisticFit& fit() const noexcept { return fit_; }

 private:
  LogisticFit fit_;
};

}  // namespace mldiff::classifiers
