#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "mldiff/error.hpp"

namespace mldiff::stats {

namespace detail {

inline double gamma_log_prefactor(double a, double x) {
  return -x + a * std::log(x) - std::lgamma(a);
}

// P(a, x) by its power series; converges quickly for x < a + 1.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < 100000; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
  }
  return sum * std::exp(gamma_log_prefactor(a, x));
}

// Q(a, x) by the Legendre continued fraction (modified Lentz); x >= a + 1.
inline double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(gamma_log_prefactor(a, x)) * h;
}

}  // namespace detail

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), a > 0, x >= 0.
inline double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0)) throw InvalidArgument("regularized_gamma_q: a must be positive");
  if (std::isnan(x) || x < 0.0) throw InvalidArgument("regularized_gamma_q: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_continued_fraction(a, x);
}

/// Survival function of the chi-squared distribution with `df` degrees of freedom.
inline double chi2_sf(double x, int df) {
  if (df <= 0) throw InvalidArgument("chi2_sf: df must be positive, got " + std::to_string(df));
  if (std::isnan(x)) throw InvalidArgument("chi2_sf: x is NaN");
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

}  // namespace mldiff::stats
