#pragma once

#include <array>
#include <cmath>

namespace mldiff::classifiers {

/// Per-class scores (s_0, s_1).
using Scores = std::array<double, 2>;

/// argmax with ties going to class 0.
inline int argmax_low(const Scores& s) noexcept { return s[1] > s[0] ? 1 : 0; }

/// Softmax of two log-scores. Both -inf gives (0.5, 0.5).
inline Scores normalize_log(const std::array<double, 2>& ll) noexcept {
  if (std::isinf(ll[0]) && std::isinf(ll[1]) && ll[0] < 0 && ll[1] < 0) return {0.5, 0.5};
  if (ll[0] >= ll[1]) {
    const double r = std::exp(ll[1] - ll[0]);
    return {1.0 / (1.0 + r), r / (1.0 + r)};
  }
  const double r = std::exp(ll[0] - ll[1]);
  return {r / (1.0 + r), 1.0 / (1.0 + r)};
}

}  // namespace mldiff::classifiers
