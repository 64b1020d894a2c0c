#pragma once

// Random forest of CART trees: Gini impurity, bootstrap resampling,
// `max_features` random candidate features per split, optional depth limit,
// minimum node size 1. Tree t draws all of its randomness from
// derive_seed(train_seed, t), so a forest is a pure function of its inputs.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mldiff/classifiers/scores.hpp"
#include "mldiff/dataset.hpp"
#include "mldiff/error.hpp"
#include "mldiff/rng.hpp"

namespace mldiff::classifiers {

struct ForestOptions {
  std::size_t n_trees = 100;
  std::size_t max_features = 3;
  std::optional<std::size_t> max_depth;
  std::uint64_t seed = 0;
};

class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    int cls = 0;
  };

  /// Grows a tree on the given (possibly repeated) rows of `d`.
  static DecisionTree grow(const Dataset& d, std::vector<std::size_t> rows, std::size_t max_features,
                           std::optional<std::size_t> max_depth, Xoshiro256ss& rng) {
    DecisionTree tree;
    tree.build(d, std::move(rows), 0, max_features, max_depth, rng);
    return tree;
  }

  int predict(std::span<const double> x) const {
    std::size_t at = 0;
    while (nodes_[at].feature >= 0) {
      const auto& node = nodes_[at];
      at = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
    }
    return nodes_[at].cls;
  }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double purity = -1.0;  // sum over children of (c0^2 + c1^2) / size; larger is better
  };

  static Split best_split(const Dataset& d, const std::vector<std::size_t>& rows,
                          const std::vector<std::size_t>& candidates) {
    Split best;
    std::vector<std::pair<double, int>> vals(rows.size());
    for (auto f : candidates) {
      for (std::size_t k = 0; k < rows.size(); ++k) vals[k] = {d.at(rows[k], f), d.label(rows[k])};
      std::sort(vals.begin(), vals.end());
      std::array<double, 2> total{0, 0};
      for (const auto& v : vals) total[v.second] += 1;
      std::array<double, 2> left{0, 0};
      for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
        left[vals[k].second] += 1;
        if (vals[k].first == vals[k + 1].first) continue;
        const double nl = left[0] + left[1];
        const double nr = static_cast<double>(vals.size()) - nl;
        const double r0 = total[0] - left[0], r1 = total[1] - left[1];
        const double purity = (left[0] * left[0] + left[1] * left[1]) / nl + (r0 * r0 + r1 * r1) / nr;
        if (purity > best.purity) {
          const double lo = vals[k].first, hi = vals[k + 1].first;
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best = {static_cast<int>(f), mid, purity};
        }
      }
    }
    return best;
  }

  std::size_t build(const Dataset& d, std::vector<std::size_t> rows, std::size_t depth,
                    std::size_t max_features, std::optional<std::size_t> max_depth, Xoshiro256ss& rng) {
    const std::size_t at = nodes_.size();
    nodes_.emplace_back();
    std::size_t ones = 0;
    for (auto r : rows) ones += static_cast<std::size_t>(d.label(r));
    nodes_[at].cls = 2 * ones > rows.size() ? 1 : 0;
    if (ones == 0 || ones == rows.size() || (max_depth && depth >= *max_depth)) return at;

    std::vector<std::size_t> features(d.cols());
    std::iota(features.begin(), features.end(), std::size_t{0});
    const std::size_t draw = std::min(max_features, d.cols());
    for (std::size_t i = 0; i < draw; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(features.size() - i));
      std::swap(features[i], features[j]);
    }
    features.resize(draw);
    std::sort(features.begin(), features.end());

    const Split split = best_split(d, rows, features);
    if (split.feature < 0) return at;

    std::vector<std::size_t> left_rows, right_rows;
    for (auto r : rows) {
      (d.at(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    nodes_[at].feature = split.feature;
    nodes_[at].threshold = split.threshold;
    const std::size_t l = build(d, std::move(left_rows), depth + 1, max_features, max_depth, rng);
    const std::size_t r = build(d, std::move(right_rows), depth + 1, max_features, max_depth, rng);
    nodes_[at].left = l;
    nodes_[at].right = r;
    return at;
  }

  std::vector<Node> nodes_;
};

class RandomForest {
 public:
  static RandomForest fit(const Dataset& d, const ForestOptions& opt) {
    if (opt.n_trees == 0) throw InvalidArgument("rf: n_trees must be >= 1");
    if (opt.max_features == 0) throw InvalidArgument("rf: max_features must be >= 1");
    if (opt.max_depth && *opt.max_depth == 0) throw InvalidArgument("rf: max_depth must be >= 1");
    RandomForest forest;
    forest.trees_.reserve(opt.n_trees);
    const std::size_t n = d.rows();
    for (std::size_t t = 0; t < opt.n_trees; ++t) {
      Xoshiro256ss rng(derive_seed(opt.seed, t));
      std::vector<std::size_t> sample(n);
      for (auto& s : sample) s = static_cast<std::size_t>(rng.below(n));
      forest.trees_.push_back(DecisionTree::grow(d, std::move(sample), opt.max_features, opt.max_depth, rng));
    }
    return forest;
  }

  /// Score of class 1 is the fraction of trees voting 1; an even split predicts 0.
  Scores scores(std::span<const double> x) const {
    std::size_t votes = 0;
    for (const auto& tree : trees_) votes += static_cast<std::size_t>(tree.predict(x));
    const double s1 = static_cast<double>(votes) / static_cast<double>(trees_.size());
    return {1.0 - s1, s1};
  }
  int predict(std::span<const double> x) const { return argmax_low(scores(x)); }

  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
};

}  // namespace mldiff::classifiers
