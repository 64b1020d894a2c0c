#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "mldiff/error.hpp"
#include "mldiff/stats/special.hpp"
#include "mldiff/stats/test_result.hpp"

namespace mldiff::stats {

/// Predicted-class counts of one classifier: {#class 0, #class 1}.
using ClassCounts = std::array<std::int64_t, 2>;

/// Pearson chi-squared homogeneity test on the 2x2 table whose rows are two
/// classifiers' predicted-class counts (df = 1). A zero column marginal means
/// both predicted the same single class: statistic 0, p 1, degenerate.
inline TestResult chi2_homogeneity_2x2(ClassCounts first, ClassCounts second, bool yates = false) {
  for (auto c : {first[0], first[1], second[0], second[1]}) {
    if (c < 0) throw InvalidArgument("chi2_homogeneity_2x2: counts must be non-negative");
  }
  const std::int64_t row1 = first[0] + first[1];
  const std::int64_t row2 = second[0] + second[1];
  if (row1 < 1 || row2 < 1) {
    throw InvalidArgument("chi2_homogeneity_2x2: each classifier needs at least one prediction");
  }
  TestResult r;
  r.n1 = static_cast<std::size_t>(row1);
  r.n2 = static_cast<std::size_t>(row2);
  const std::array<std::int64_t, 2> col{first[0] + second[0], first[1] + second[1]};
  if (col[0] == 0 || col[1] == 0) {
    r.degenerate = true;
    return r;
  }
  const double total = static_cast<double>(row1 + row2);
  const std::array<std::array<std::int64_t, 2>, 2> observed{first, second};
  const std::array<std::int64_t, 2> rows{row1, row2};
  double stat = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double expected = static_cast<double>(rows[i]) * static_cast<double>(col[j]) / total;
      double dev = std::fabs(static_cast<double>(observed[i][j]) - expected);
      if (yates) dev -= std::min(0.5, dev);
      stat += dev * dev / expected;
    }
  }
  r.statistic = stat;
  r.p_value = std::clamp(chi2_sf(stat, 1), 0.0, 1.0);
  return r;
}

}  // namespace mldiff::stats
