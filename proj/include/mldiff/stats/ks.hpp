#pragma once

// Two-sample Kolmogorov-Smirnov test.
//
// The p-value defaults to the exact permutation (conditional) distribution of
// D given the pooled sample, ties included, computed by a lattice-path
// recursion in O(n1 * n2). Very large samples fall back to the asymptotic
// Kolmogorov distribution with the Stephens small-sample correction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <utility>
#include <vector>

#include "mldiff/error.hpp"
#include "mldiff/stats/test_result.hpp"

namespace mldiff::stats {

enum class KsMethod { automatic, exact, asymptotic };

/// Above this n1 * n2 the automatic method switches to the asymptotic p-value.
inline constexpr std::uint64_t ks_exact_cell_limit = 25'000'000;

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2),
/// truncated once a term falls below 1e-12; clamped to [0, 1].
inline double kolmogorov_q(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k < 1'000'000; ++k) {
    const double term = 2.0 * sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-12) return std::clamp(sum, 0.0, 1.0);
    sign = -sign;
  }
  return 1.0;  // did not converge: lambda is tiny, Q is 1 to working precision
}

/// Asymptotic p-value for statistic `d` with sample sizes n1, n2.
inline double ks_asymptotic_pvalue(double d, std::size_t n1, std::size_t n2) {
  const double ne = static_cast<double>(n1) * static_cast<double>(n2) / static_cast<double>(n1 + n2);
  const double root = std::sqrt(ne);
  return kolmogorov_q((root + 0.12 + 0.11 / root) * d);
}

namespace detail {

// Merged sorted sample summarized for the lattice walk.
struct KsPath {
  std::int64_t max_gap = 0;            // max |i*n2 - j*n1| over tie-group ends
  std::vector<bool> checked;           // checked[t]: a tie group ends after t pooled values
};

inline KsPath ks_path(std::span<const double> a, std::span<const double> b) {
  std::vector<std::pair<double, int>> pooled;
  pooled.reserve(a.size() + b.size());
  for (double v : a) pooled.emplace_back(v, 0);
  for (double v : b) pooled.emplace_back(v, 1);
  std::sort(pooled.begin(), pooled.end());
  const auto n1 = static_cast<std::int64_t>(a.size());
  const auto n2 = static_cast<std::int64_t>(b.size());
  KsPath path;
  path.checked.assign(pooled.size() + 1, false);
  std::int64_t i = 0, j = 0;
  for (std::size_t t = 0; t < pooled.size(); ++t) {
    (pooled[t].second == 0 ? i : j) += 1;
    const bool group_end = t + 1 == pooled.size() || pooled[t + 1].first != pooled[t].first;
    if (!group_end) continue;
    path.checked[t + 1] = true;
    path.max_gap = std::max(path.max_gap, std::abs(i * n2 - j * n1));
  }
  return path;
}

// P(D_perm >= D_obs) over all C(n1+n2, n1) equally likely label assignments.
// h[j] after row i is the fraction of monotone paths to (i, j) that already
// touched the rejection region at a checked position.
inline double ks_exact_pvalue(const KsPath& path, std::size_t n1, std::size_t n2) {
  if (path.max_gap == 0) return 1.0;
  const auto s1 = static_cast<std::int64_t>(n1);
  const auto s2 = static_cast<std::int64_t>(n2);
  auto hit = [&](std::int64_t i, std::int64_t j) {
    return path.checked[static_cast<std::size_t>(i + j)] && std::abs(i * s2 - j * s1) >= path.max_gap;
  };
  std::vector<double> h(n2 + 1, 0.0);  // indexed by j
  for (std::int64_t j = 1; j <= s2; ++j) h[j] = hit(0, j) ? 1.0 : h[j - 1];
  for (std::int64_t i = 1; i <= s1; ++i) {
    h[0] = hit(i, 0) ? 1.0 : h[0];
    for (std::int64_t j = 1; j <= s2; ++j) {
      if (hit(i, j)) {
        h[j] = 1.0;
      } else {
        const double di = static_cast<double>(i), dj = static_cast<double>(j);
        h[j] = (di * h[j] + dj * h[j - 1]) / (di + dj);
      }
    }
  }
  return std::clamp(h[n2], 0.0, 1.0);
}

}  // namespace detail

/// D = sup |ECDF_a - ECDF_b| evaluated exactly at every distinct pooled value.
inline double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_statistic: both samples must be non-empty");
  const auto path = detail::ks_path(a, b);
  return static_cast<double>(path.max_gap) /
         (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

inline TestResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                                KsMethod method = KsMethod::automatic) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample: both samples must be non-empty");
  for (auto s : {a, b}) {
    for (double v : s) {
      if (!std::isfinite(v)) throw InvalidArgument("ks_two_sample: non-finite sample value");
    }
  }
  const auto path = detail::ks_path(a, b);
  TestResult r;
  r.n1 = a.size();
  r.n2 = b.size();
  r.statistic = static_cast<double>(path.max_gap) /
                (static_cast<double>(r.n1) * static_cast<double>(r.n2));
  if (method == KsMethod::automatic) {
    method = static_cast<std::uint64_t>(r.n1) * r.n2 <= ks_exact_cell_limit ? KsMethod::exact
                                                                             : KsMethod::asymptotic;
  }
  r.p_value = method == KsMethod::exact ? detail::ks_exact_pvalue(path, r.n1, r.n2)
                                        : ks_asymptotic_pvalue(r.statistic, r.n1, r.n2);
  return r;
}

}  // namespace mldiff::stats
