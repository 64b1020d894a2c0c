#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mldiff/error.hpp"
#include "mldiff/rng.hpp"

namespace mldiff {

/// Binary-classification data: n rows of m finite features plus a 0/1 label.
///
/// Construction validates the shape and value invariants, so every Dataset
/// that exists is well formed. Single-class datasets are allowed and reported
/// by degenerate().
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::string name, std::size_t m, std::vector<double> features, std::vector<int> labels,
          std::optional<std::uint64_t> seed = std::nullopt)
      : name_(std::move(name)), m_(m), features_(std::move(features)), labels_(std::move(labels)),
        seed_(seed) {
    if (m_ == 0) throw InvalidArgument("dataset '" + name_ + "': need at least one feature");
    if (labels_.empty()) throw InvalidArgument("dataset '" + name_ + "': need at least one row");
    if (features_.size() != labels_.size() * m_) {
      throw InvalidArgument("dataset '" + name_ + "': feature matrix is not n x m");
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] != 0 && labels_[i] != 1) {
        throw InvalidArgument("dataset '" + name_ + "': label of row " + std::to_string(i) +
                              " is not 0 or 1");
      }
    }
    for (std::size_t k = 0; k < features_.size(); ++k) {
      if (!std::isfinite(features_[k])) {
        throw InvalidArgument("dataset '" + name_ + "': non-finite feature at row " +
                              std::to_string(k / m_) + ", column " + std::to_string(k % m_));
      }
    }
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t rows() const noexcept { return labels_.size(); }
  std::size_t cols() const noexcept { return m_; }
  const std::optional<std::uint64_t>& seed() const noexcept { return seed_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {features_.data() + i * m_, m_};
  }
  double at(std::size_t i, std::size_t j) const noexcept { return features_[i * m_ + j]; }
  int label(std::size_t i) const noexcept { return labels_[i]; }

  const std::vector<double>& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  std::size_t count(int cls) const noexcept {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), cls));
  }
  /// Only one class present.
  bool degenerate() const noexcept { return count(0) == 0 || count(1) == 0; }

  /// Rows restricted to `indices`, in the given order.
  Dataset subset(std::span<const std::size_t> indices, std::string name) const {
    std::vector<double> feats;
    feats.reserve(indices.size() * m_);
    std::vector<int> labs;
    labs.reserve(indices.size());
    for (auto i : indices) {
      auto r = row(i);
      feats.insert(feats.end(), r.begin(), r.end());
      labs.push_back(labels_[i]);
    }
    return Dataset(std::move(name), m_, std::move(feats), std::move(labs), seed_);
  }

  /// Content identity (features and labels only, not the name).
  std::uint64_t fingerprint() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
      for (int b = 0; b < 8; ++b) {
        h ^= (v >> (8 * b)) & 0xffU;
        h *= 0x100000001b3ULL;
      }
    };
    mix(rows());
    mix(m_);
    for (double v : features_) mix(std::bit_cast<std::uint64_t>(v));
    for (int l : labels_) mix(static_cast<std::uint64_t>(l));
    return h;
  }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.m_ == b.m_ && a.labels_ == b.labels_ && a.features_.size() == b.features_.size() &&
           std::equal(a.features_.begin(), a.features_.end(), b.features_.begin(),
                      [](double x, double y) {
                        return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y);
                      });
  }

 private:
  std::string name_;
  std::size_t m_ = 0;
  std::vector<double> features_;
  std::vector<int> labels_;
  std::optional<std::uint64_t> seed_;
};

/// A 50/50 stratified partition of a source dataset.
struct SplitDataset {
  Dataset train;
  Dataset test;
  std::uint64_t split_seed = 0;
  // Source row of each partition row.
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

namespace detail {

inline void require_even(std::size_t n, const char* what) {
  if (n == 0 || n % 2 != 0) {
    throw InvalidArgument(std::string(what) + ": n must be a positive even number, got " +
                          std::to_string(n));
  }
}

inline std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace detail

/// Side length of the corner hyperrectangle [0, s]^m whose volume is 1/2.
inline double uniform_box_side(std::size_t m) {
  return std::pow(0.5, 1.0 / static_cast<double>(m));
}

/// UNIFORM data: n/2 rows inside [0, 0.5^(1/m)]^m labelled 1, n/2 rows
/// outside it labelled 0, features uniform on their region, rows shuffled.
inline Dataset generate_uniform(std::size_t n, std::size_t m, std::uint64_t seed) {
  detail::require_even(n, "generate_uniform");
  if (m == 0) throw InvalidArgument("generate_uniform: m must be >= 1");
  Xoshiro256ss rng(seed);
  const double side = uniform_box_side(m);
  const std::size_t half = n / 2;

  std::vector<double> rows_data;
  rows_data.reserve(n * m);
  for (std::size_t i = 0; i < half; ++i) {
    for (std::size_t j = 0; j < m; ++j) rows_data.push_back(rng.uniform() * side);
  }
  std::vector<double> candidate(m);
  for (std::size_t i = 0; i < half; ++i) {
    // rejection: accept once any coordinate leaves the box
    for (;;) {
      bool outside = false;
      for (auto& v : candidate) {
        v = rng.uniform();
        outside = outside || v > side;
      }
      if (outside) break;
    }
    rows_data.insert(rows_data.end(), candidate.begin(), candidate.end());
  }

  auto order = detail::iota_indices(n);
  shuffle(std::span<std::size_t>(order), rng);
  std::vector<double> feats;
  feats.reserve(n * m);
  std::vector<int> labels;
  labels.reserve(n);
  for (auto src : order) {
    feats.insert(feats.end(), rows_data.begin() + static_cast<std::ptrdiff_t>(src * m),
                 rows_data.begin() + static_cast<std::ptrdiff_t>((src + 1) * m));
    labels.push_back(src < half ? 1 : 0);
  }
  return Dataset("uniform", m, std::move(feats), std::move(labels), seed);
}

/// RANDOM data: uniform features, exactly n/2 labels per class assigned by a
/// shuffle that is independent of the features.
inline Dataset generate_random(std::size_t n, std::size_t m, std::uint64_t seed) {
  detail::require_even(n, "generate_random");
  if (m == 0) throw InvalidArgument("generate_random: m must be >= 1");
  Xoshiro256ss rng(seed);
  std::vector<double> feats(n * m);
  for (auto& v : feats) v = rng.uniform();
  std::vector<int> labels(n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n / 2), 1);
  shuffle(std::span<int>(labels), rng);
  return Dataset("random", m, std::move(feats), std::move(labels), seed);
}

/// Per-column (x - min) / (max - min); constant columns become 0.
inline Dataset normalize_minmax(const Dataset& d) {
  const std::size_t n = d.rows(), m = d.cols();
  std::vector<double> lo(m), hi(m);
  for (std::size_t j = 0; j < m; ++j) lo[j] = hi[j] = d.at(0, j);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      lo[j] = std::min(lo[j], d.at(i, j));
      hi[j] = std::max(hi[j], d.at(i, j));
    }
  }
  std::vector<double> feats(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double range = hi[j] - lo[j];
      double v = range > 0 ? (d.at(i, j) - lo[j]) / range : 0.0;
      feats[i * m + j] = std::clamp(v, 0.0, 1.0);
    }
  }
  return Dataset(d.name(), m, std::move(feats), d.labels(), d.seed());
}

/// Stratified 50/50 split. Each class is shuffled with the split seed and
/// halved; when both classes are odd the spare rows go to opposite partitions
/// so that |train.n - test.n| <= 1. Partition rows keep source order.
inline SplitDataset split_half(const Dataset& d, std::uint64_t seed) {
  if (d.rows() < 2) throw InvalidArgument("split_half: need at least two rows");
  Xoshiro256ss rng(seed);
  std::vector<std::size_t> train_rows, test_rows;
  bool spare_to_train = true;
  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < d.rows(); ++i) {
      if (d.label(i) == cls) idx.push_back(i);
    }
    shuffle(std::span<std::size_t>(idx), rng);
    std::size_t k = idx.size() / 2;
    if (idx.size() % 2 == 1) {
      if (spare_to_train) ++k;
      spare_to_train = !spare_to_train;
    }
    train_rows.insert(train_rows.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
    test_rows.insert(test_rows.end(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  SplitDataset out{d.subset(train_rows, d.name() + "/train"), d.subset(test_rows, d.name() + "/test"),
                   seed, std::move(train_rows), std::move(test_rows)};
  return out;
}

}  // namespace mldiff
