#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mldiff/rng.hpp"
#include "mldiff/stats.hpp"

using namespace mldiff;
using namespace mldiff::stats;

namespace {

// Survival function of chi-squared with one degree of freedom by Simpson
// integration of the density after the substitution t = u^2, which removes
// the singularity at 0: P(X > x) = int_{sqrt x}^inf 2 phi(u) du.
double chi2_1_sf_by_integration(double x) {
  const double lo = std::sqrt(x), hi = lo + 40.0;
  const int steps = 40000;
  const double h = (hi - lo) / steps;
  auto f = [](double u) { return 2.0 * std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI); };
  double s = f(lo) + f(hi);
  for (int i = 1; i < steps; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

// Exact permutation p-value by enumerating every assignment of the pooled
// values to the first sample.
double ks_enumeration_pvalue(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const double observed = ks_statistic(a, b);
  const std::size_t n = pooled.size(), n1 = a.size();
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(n1), true);
  std::size_t total = 0, extreme = 0;
  std::sort(pick.begin(), pick.end());
  do {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n; ++i) (pick[i] ? x : y).push_back(pooled[i]);
    extreme += ks_statistic(x, y) >= observed - 1e-12;
    ++total;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

std::vector<double> draw(Xoshiro256ss& rng, std::size_t n, double shift, int levels = 0) {
  std::vector<double> v(n);
  for (auto& x : v) {
    x = rng.uniform() + shift;
    if (levels) x = std::floor(x * levels) / levels;
  }
  return v;
}

}  // namespace

TEST(Chi2Sf, Examples) {
  EXPECT_EQ(chi2_sf(0.0, 1), 1.0);
  EXPECT_NEAR(chi2_sf(3.841, 1), 0.05, 5e-4);
  EXPECT_NEAR(chi2_sf(8.0, 1), 0.00468, 1e-5);
  EXPECT_NEAR(chi2_sf(8.0, 1), std::erfc(2.0), 1e-14);
  EXPECT_THROW(chi2_sf(1.0, 0), InvalidArgument);
}

TEST(Chi2Sf, MatchesNumericIntegrationOnGrid) {
  double previous = 1.0 + 1e-9;
  for (int i = 1; i <= 100; ++i) {
    const double x = 0.3 * i;
    const double p = chi2_sf(x, 1);
    ASSERT_NEAR(p, chi2_1_sf_by_integration(x), 1e-8) << "x = " << x;
    ASSERT_LT(p, previous);
    previous = p;
  }
}

TEST(Chi2Sf, OtherDegreesOfFreedom) {
  for (double x : {0.1, 1.0, 5.0, 30.0, 90.0}) {
    EXPECT_NEAR(chi2_sf(x, 2), std::exp(-x / 2), 1e-12);
    // df = 3: erfc(sqrt(x/2)) + sqrt(2x/pi) e^{-x/2}
    EXPECT_NEAR(chi2_sf(x, 3), std::erfc(std::sqrt(x / 2)) + std::sqrt(2 * x / M_PI) * std::exp(-x / 2), 1e-12);
  }
}

TEST(Chi2Homogeneity, Examples) {
  auto r = chi2_homogeneity_2x2({50, 50}, {50, 50});
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);

  r = chi2_homogeneity_2x2({60, 40}, {40, 60});
  EXPECT_NEAR(r.statistic, 8.0, 1e-9);
  EXPECT_NEAR(r.p_value, 0.00468, 1e-5);

  r = chi2_homogeneity_2x2({100, 0}, {100, 0});
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_TRUE(r.degenerate);
  EXPECT_THROW(chi2_homogeneity_2x2({-1, 2}, {3, 4}), InvalidArgument);
  EXPECT_THROW(chi2_homogeneity_2x2({0, 0}, {3, 4}), InvalidArgument);
}

TEST(Chi2Homogeneity, Yates) {
  // |O - E| = 10 everywhere, corrected to 9.5: 4 * 9.5^2 / 50 = 7.22
  const auto r = chi2_homogeneity_2x2({60, 40}, {40, 60}, true);
  EXPECT_NEAR(r.statistic, 7.22, 1e-12);
  EXPECT_EQ(chi2_homogeneity_2x2({50, 50}, {50, 50}, true).statistic, 0.0);
}

TEST(Chi2Homogeneity, SymmetryAndRelabeling) {
  Xoshiro256ss rng(5);
  for (int t = 0; t < 200; ++t) {
    const ClassCounts a{static_cast<std::int64_t>(rng.below(60)) + 1, static_cast<std::int64_t>(rng.below(60))};
    const ClassCounts b{static_cast<std::int64_t>(rng.below(60)), static_cast<std::int64_t>(rng.below(60)) + 1};
    const auto r = chi2_homogeneity_2x2(a, b);
    const auto swapped = chi2_homogeneity_2x2(b, a);
    const auto relabeled = chi2_homogeneity_2x2({a[1], a[0]}, {b[1], b[0]});
    EXPECT_NEAR(r.statistic, swapped.statistic, 1e-12);
    EXPECT_NEAR(r.p_value, swapped.p_value, 1e-12);
    EXPECT_NEAR(r.statistic, relabeled.statistic, 1e-12);
    EXPECT_NEAR(r.p_value, relabeled.p_value, 1e-12);
    EXPECT_GE(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
  }
}

TEST(KolmogorovQ, KnownValues) {
  EXPECT_NEAR(kolmogorov_q(1.0), 0.26999967167735456, 1e-12);
  EXPECT_NEAR(kolmogorov_q(1.358), 0.05, 2e-4);
  EXPECT_EQ(kolmogorov_q(0.0), 1.0);
  double previous = 1.0;
  for (double l = 0.05; l < 3.0; l += 0.05) {
    const double q = kolmogorov_q(l);
    EXPECT_LE(q, previous + 1e-12);  // series truncated at 1e-12
    previous = q;
  }
}

TEST(KsTwoSample, IdenticalSamples) {
  const std::vector<double> a{0.1, 0.4, 0.4, 0.9};
  for (auto method : {KsMethod::exact, KsMethod::asymptotic}) {
    const auto r = ks_two_sample(a, a, method);
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_EQ(r.p_value, 1.0);
  }
}

TEST(KsTwoSample, DisjointSupports) {
  for (std::size_t n = 5; n <= 40; ++n) {
    const std::vector<double> a(n, 0.0), b(n, 1.0);
    for (auto method : {KsMethod::exact, KsMethod::asymptotic}) {
      const auto r = ks_two_sample(a, b, method);
      EXPECT_EQ(r.statistic, 1.0);
      EXPECT_LT(r.p_value, 0.05) << "n = " << n;
    }
  }
  // Exact: both samples all-extreme is 2 / C(2n, n).
  const auto r = ks_two_sample(std::vector<double>(5, 0.0), std::vector<double>(5, 1.0), KsMethod::exact);
  EXPECT_NEAR(r.p_value, 2.0 / 252.0, 1e-15);
}

TEST(KsTwoSample, StatisticWithTies) {
  // ECDFs are right-continuous: at 0.5 a is at 2/3 and b at 1/3; at 0.8 a
  // reaches 1 while b stays at 1/3.
  const std::vector<double> a{0.2, 0.5, 0.8}, b{0.5, 0.9, 0.9};
  EXPECT_NEAR(ks_statistic(a, b), 2.0 / 3.0, 1e-15);
  const std::vector<double> c{0.5, 0.5}, d{0.5, 0.7};
  EXPECT_NEAR(ks_statistic(c, d), 0.5, 1e-15);
  EXPECT_THROW(ks_two_sample({}, b), InvalidArgument);
  EXPECT_THROW(ks_two_sample(std::vector<double>{NAN}, b), InvalidArgument);
}

TEST(KsTwoSample, ExactMatchesEnumeration) {
  Xoshiro256ss rng(31);
  for (int t = 0; t < 12; ++t) {
    const std::size_t n1 = 3 + t % 4, n2 = 4 + (t * 7) % 5;
    const auto a = draw(rng, n1, 0.0, t % 3 == 0 ? 4 : 0);
    const auto b = draw(rng, n2, t % 2 ? 0.3 : 0.0, t % 3 == 0 ? 4 : 0);
    const auto r = ks_two_sample(a, b, KsMethod::exact);
    EXPECT_NEAR(r.p_value, ks_enumeration_pvalue(a, b), 1e-12) << "fixture " << t;
  }
}

TEST(KsTwoSample, SymmetricAndRankInvariant) {
  Xoshiro256ss rng(8);
  for (int t = 0; t < 30; ++t) {
    const auto a = draw(rng, 30, 0.0, t % 2 ? 10 : 0);
    const auto b = draw(rng, 25, 0.1, t % 2 ? 10 : 0);
    for (auto method : {KsMethod::exact, KsMethod::asymptotic}) {
      const auto ab = ks_two_sample(a, b, method), ba = ks_two_sample(b, a, method);
      EXPECT_EQ(ab.statistic, ba.statistic);
      EXPECT_NEAR(ab.p_value, ba.p_value, 1e-12);
      auto ta = a, tb = b;
      for (auto* v : {&ta, &tb}) {
        for (auto& x : *v) x = std::exp(3 * x) - 7;
      }
      const auto t2 = ks_two_sample(ta, tb, method);
      EXPECT_EQ(t2.statistic, ab.statistic);
      EXPECT_NEAR(t2.p_value, ab.p_value, 1e-12);
    }
  }
}

TEST(KsTwoSample, PValueMonotoneInStatistic) {
  for (std::size_t n : {10u, 50u}) {
    double previous = 1.0;
    for (std::size_t shift = 0; shift <= n; ++shift) {
      // b is a shifted by `shift` ranks, so D = shift / n.
      std::vector<double> a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = static_cast<double>(i);
        b[i] = static_cast<double>(i + shift) + 0.5;
      }
      for (auto method : {KsMethod::exact, KsMethod::asymptotic}) {
        const auto r = ks_two_sample(a, b, method);
        EXPECT_GE(r.p_value, 0.0);
        EXPECT_LE(r.p_value, 1.0);
        if (method == KsMethod::exact) {
          EXPECT_LE(r.p_value, previous + 1e-15);
          previous = r.p_value;
        }
      }
    }
  }
}

TEST(KsTwoSample, AutomaticSwitchesToAsymptoticForHugeSamples) {
  Xoshiro256ss rng(2);
  const auto a = draw(rng, 6000, 0.0), b = draw(rng, 6000, 0.0);
  const auto r = ks_two_sample(a, b);
  EXPECT_EQ(r.p_value, ks_asymptotic_pvalue(r.statistic, 6000, 6000));
}
