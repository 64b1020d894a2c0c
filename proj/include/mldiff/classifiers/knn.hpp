#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mldiff/classifiers/scores.hpp"
#include "mldiff/dataset.hpp"
#include "mldiff/error.hpp"

namespace mldiff::classifiers {

/// knn-a: distance ties -> lower row index, vote ties -> class 0.
/// knn-b: distance ties -> higher row index, vote ties -> nearest neighbour's class.
enum class KnnTieRule { variant_a, variant_b };

class KNearestNeighbors {
 public:
  static KNearestNeighbors fit(const Dataset& d, std::size_t k, KnnTieRule rule) {
    if (k == 0) throw InvalidArgument("knn: k must be >= 1");
    if (k > d.rows()) {
      throw InvalidArgument("knn: k = " + std::to_string(k) + " exceeds training size " +
                            std::to_string(d.rows()));
    }
    KNearestNeighbors model;
    model.train_ = d;
    model.k_ = k;
    model.rule_ = rule;
    return model;
  }

  /// Training-row indices of the k nearest neighbours, nearest first.
  std::vector<std::size_t> neighbors(std::span<const double> x) const {
    const std::size_t n = train_.rows();
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = train_.row(i);
      double sq = 0.0;
      for (std::size_t j = 0; j < r.size(); ++j) sq += (r[j] - x[j]) * (r[j] - x[j]);
      dist[i] = {sq, i};
    }
    const bool low_index_first = rule_ == KnnTieRule::variant_a;
    auto closer = [low_index_first](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return low_index_first ? a.second < b.second : a.second > b.second;
    };
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end(), closer);
    std::vector<std::size_t> out(k_);
    for (std::size_t i = 0; i < k_; ++i) out[i] = dist[i].second;
    return out;
  }

  Scores scores(std::span<const double> x) const { return vote(neighbors(x)).first; }
  int predict(std::span<const double> x) const { return vote(neighbors(x)).second; }

  std::size_t k() const noexcept { return k_; }

 private:
  std::pair<Scores, int> vote(const std::vector<std::size_t>& nn) const {
    std::size_t ones = 0;
    for (auto i : nn) ones += static_cast<std::size_t>(train_.label(i));
    const double s1 = static_cast<double>(ones) / static_cast<double>(k_);
    int cls = 0;
    if (2 * ones > k_) {
      cls = 1;
    } else if (2 * ones == k_) {
      cls = rule_ == KnnTieRule::variant_a ? 0 : train_.label(nn.front());
    }
    return {Scores{1.0 - s1, s1}, cls};
  }

  Dataset train_;
  std::size_t k_ = 1;
  KnnTieRule rule_ = KnnTieRule::variant_a;
};

}  // namespace mldiff::classifiers
