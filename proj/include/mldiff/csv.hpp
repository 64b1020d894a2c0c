#pragma once

// Dataset CSV format: UTF-8, comma separated, header row, feature columns
// f0..f{m-1}, label column `label`, `.` decimal point, no quoting.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mldiff/dataset.hpp"
#include "mldiff/error.hpp"

namespace mldiff {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace csv {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

inline bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based file line of each row
};

inline Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "': file not found or unreadable");
  Table t;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (!have_header) {
      if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        cells.front().remove_prefix(3);
      }
      for (auto c : cells) t.header.emplace_back(c);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ParseError(path.string() + ": line " + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " cells, header has " +
                       std::to_string(t.header.size()));
    }
    std::vector<std::string> row;
    row.reserve(cells.size());
    for (auto c : cells) row.emplace_back(c);
    t.rows.push_back(std::move(row));
    t.line_numbers.push_back(line_no);
  }
  if (!have_header) throw ParseError(path.string() + ": empty file, header row missing");
  return t;
}

}  // namespace csv

/// Generic loader: every column except `label_column` is a numeric feature, in
/// file order. The label column must hold exactly two distinct strings; the
/// lexicographically smaller one becomes class 0.
inline Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                        std::string name = {}) {
  auto table = csv::read_table(path);
  auto it = std::find(table.header.begin(), table.header.end(), label_column);
  if (it == table.header.end()) {
    throw ParseError(path.string() + ": no label column named '" + label_column + "'");
  }
  const auto label_col = static_cast<std::size_t>(it - table.header.begin());
  const std::size_t m = table.header.size() - 1;
  if (m == 0) throw ParseError(path.string() + ": no feature columns");
  if (table.rows.empty()) throw ParseError(path.string() + ": no data rows");

  std::set<std::string> distinct;
  for (const auto& row : table.rows) distinct.insert(row[label_col]);
  if (distinct.size() != 2) {
    throw ParseError(path.string() + ": label column '" + label_column + "' has " +
                     std::to_string(distinct.size()) + " distinct values, expected exactly 2");
  }
  const std::string& zero = *distinct.begin();

  std::vector<double> feats;
  feats.reserve(table.rows.size() * m);
  std::vector<int> labels;
  labels.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == label_col) continue;
      double v = 0;
      if (!csv::parse_double(row[c], v) || !std::isfinite(v)) {
        throw ParseError(path.string() + ": line " + std::to_string(table.line_numbers[r]) +
                         ", column '" + table.header[c] + "': not a finite number: '" + row[c] + "'");
      }
      feats.push_back(v);
    }
    labels.push_back(row[label_col] == zero ? 0 : 1);
  }
  if (name.empty()) name = path.stem().string();
  return Dataset(std::move(name), m, std::move(feats), std::move(labels));
}

/// Reads a partition file written by write_dataset_csv: labels must already
/// be the literal classes 0/1 (a single class is allowed).
inline Dataset read_dataset_csv(const std::filesystem::path& path, std::string name = {}) {
  auto table = csv::read_table(path);
  if (table.header.empty() || table.header.back() != "label") {
    throw ParseError(path.string() + ": last column must be 'label'");
  }
  const std::size_t m = table.header.size() - 1;
  if (m == 0) throw ParseError(path.string() + ": no feature columns");
  if (table.rows.empty()) throw ParseError(path.string() + ": no data rows");
  std::vector<double> feats;
  feats.reserve(table.rows.size() * m);
  std::vector<int> labels;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    for (std::size_t c = 0; c < m; ++c) {
      double v = 0;
      if (!csv::parse_double(row[c], v) || !std::isfinite(v)) {
        throw ParseError(path.string() + ": line " + std::to_string(table.line_numbers[r]) +
                         ", column '" + table.header[c] + "': not a finite number: '" + row[c] + "'");
      }
      feats.push_back(v);
    }
    if (row[m] != "0" && row[m] != "1") {
      throw ParseError(path.string() + ": line " + std::to_string(table.line_numbers[r]) +
                       ", column 'label': expected 0 or 1, got '" + row[m] + "'");
    }
    labels.push_back(row[m] == "1" ? 1 : 0);
  }
  if (name.empty()) name = path.stem().string();
  return Dataset(std::move(name), m, std::move(feats), std::move(labels));
}

/// Writes `d` with shortest round-trip decimals, so re-reading is bit-exact.
inline void write_dataset_csv(const std::filesystem::path& path, const Dataset& d) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (std::size_t j = 0; j < d.cols(); ++j) out << 'f' << j << ',';
  out << "label\n";
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) out << format_double(d.at(i, j)) << ',';
    out << d.label(i) << '\n';
  }
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

}  // namespace mldiff
