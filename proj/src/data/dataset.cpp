// Copyright 2026 The qkbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qkbench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "qkbench/rng.hpp"

namespace qkb {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

// RFC 4180 subset: double-quoted fields with "" escapes, no embedded newlines.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  return ec == std::errc() && p == e && std::isfinite(v);
}

}  // namespace

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset d;
  d.name = name;
  d.feature_names = feature_names;
  d.zero_as_missing = zero_as_missing;
  d.provenance = provenance;
  d.synthetic = synthetic;
  d.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  d.y.reserve(rows.size());
  if (groups) d.groups.emplace();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d.X.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
    d.y.push_back(y[rows[i]]);
    if (groups) d.groups->push_back((*groups)[rows[i]]);
  }
  return d;
}

Dataset load_dataset(const std::filesystem::path& path, const CsvSchema& schema, std::string name) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open dataset file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument(path.string() + ": empty file");
  const std::vector<std::string> header = split_csv_line(line);

  auto find_col = [&](const std::string& col) -> int {
    const auto it = std::find(header.begin(), header.end(), col);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  const int label_col = find_col(schema.label_column);
  if (label_col < 0) throw std::invalid_argument(path.string() + ": missing label column '" + schema.label_column + "'");
  int group_col = -1;
  if (schema.group_column) {
    group_col = find_col(*schema.group_column);
    if (group_col < 0) throw std::invalid_argument(path.string() + ": missing group column '" + *schema.group_column + "'");
  }
  std::vector<bool> skip(header.size(), false);
  skip[static_cast<std::size_t>(label_col)] = true;
  if (group_col >= 0) skip[static_cast<std::size_t>(group_col)] = true;
  for (const auto& c : schema.drop_columns) {
    const int j = find_col(c);
    if (j < 0) throw std::invalid_argument(path.string() + ": unknown dropped column '" + c + "'");
    skip[static_cast<std::size_t>(j)] = true;
  }

  Dataset d;
  d.name = name.empty() ? path.stem().string() : std::move(name);
  d.provenance = path.string();
  std::vector<std::size_t> feature_cols;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (!skip[j]) {
      feature_cols.push_back(j);
      d.feature_names.push_back(header[j]);
    }
  }
  for (const auto& c : schema.zero_as_missing) {
    const auto it = std::find(d.feature_names.begin(), d.feature_names.end(), c);
    if (it == d.feature_names.end()) throw std::invalid_argument(path.string() + ": unknown missing-as-zero column '" + c + "'");
    d.zero_as_missing.push_back(static_cast<int>(it - d.feature_names.begin()));
  }

  std::vector<double> values;
  std::map<std::string, int> group_ids;
  std::vector<int> groups;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::invalid_argument(path.string() + ": row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                  " fields, header has " + std::to_string(header.size()));
    }
    for (std::size_t j : feature_cols) {
      double v = 0.0;
      if (!parse_double(cells[j], v)) {
        throw std::invalid_argument(path.string() + ": row " + std::to_string(row) + ", column '" + header[j] +
                                    "': not a finite number ('" + cells[j] + "')");
      }
      values.push_back(v);
    }
    d.y.push_back(cells[static_cast<std::size_t>(label_col)] == schema.positive_value ? 1 : -1);
    if (group_col >= 0) {
      const auto [it, inserted] =
          group_ids.emplace(cells[static_cast<std::size_t>(group_col)], static_cast<int>(group_ids.size()));
      groups.push_back(it->second);
    }
  }
  const auto n = static_cast<Eigen::Index>(d.y.size());
  const auto p = static_cast<Eigen::Index>(feature_cols.size());
  d.X = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(values.data(), n, p);
  if (group_col >= 0) d.groups = std::move(groups);
  const auto pos = std::count(d.y.begin(), d.y.end(), 1);
  if (pos == 0 || pos == n) {
    throw std::invalid_argument(path.string() + ": single-class data (positive value '" + schema.positive_value + "')");
  }
  return d;
}

Dataset make_blobs(std::size_t n, double separation, int d, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("make_blobs: d must be >= 1");
  SplitMix64 rng(seed);
  Dataset out;
  out.name = "blobs";
  out.provenance = "synthetic:blobs";
  out.synthetic = true;
  out.X.resize(static_cast<Eigen::Index>(n), d);
  // centres at +-separation/2 along the diagonal direction
  const double offset = 0.5 * separation / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? 1 : -1;
    out.y.push_back(label);
    for (int j = 0; j < d; ++j) out.X(static_cast<Eigen::Index>(i), j) = label * offset + rng.normal();
  }
  for (int j = 0; j < d; ++j) out.feature_names.push_back("x" + std::to_string(j));
  return out;
}

Dataset make_xor(std::size_t n, double noise, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Dataset out;
  out.name = "xor";
  out.provenance = "synthetic:xor";
  out.synthetic = true;
  out.X.resize(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = (i % 4) < 2 ? 1.0 : -1.0;
    const double b = (i % 2) == 0 ? 1.0 : -1.0;
    out.X(static_cast<Eigen::Index>(i), 0) = a + noise * rng.normal();
    out.X(static_cast<Eigen::Index>(i), 1) = b + noise * rng.normal();
    out.y.push_back(a * b > 0 ? 1 : -1);
  }
  out.feature_names = {"x0", "x1"};
  return out;
}

std::vector<std::size_t> stratified_subsample(std::span<const int> y, std::size_t n, std::uint64_t seed) {
  if (n >= y.size()) {
    std::vector<std::size_t> all(y.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? pos : neg).push_back(i);
  const double exact_pos = static_cast<double>(n) * static_cast<double>(pos.size()) / static_cast<double>(y.size());
  auto n_pos = static_cast<std::size_t>(std::floor(exact_pos));
  if (exact_pos - static_cast<double>(n_pos) >= 0.5) ++n_pos;
  n_pos = std::clamp<std::size_t>(n_pos, n > 1 ? 1 : 0, std::min(pos.size(), n));
  const std::size_t n_neg = std::min(neg.size(), n - n_pos);
  SplitMix64 rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<std::size_t> out(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(n_pos));
  out.insert(out.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(n_neg));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace qkb
