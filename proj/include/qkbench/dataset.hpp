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

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qkb {

struct Dataset {
  std::string name;
  Eigen::MatrixXd X;                     // raw values; imputation happens per fold
  std::vector<int> y;                    // +1 / -1
  std::optional<std::vector<int>> groups;
  std::vector<std::string> feature_names;
  std::vector<int> zero_as_missing;      // column indices imputed at fold-fit time
  std::string provenance;                // source path, or "synthetic:<generator>"
  bool synthetic = false;

  [[nodiscard]] std::size_t size() const { return y.size(); }
  [[nodiscard]] Dataset subset(std::span<const std::size_t> rows) const;
};

struct CsvSchema {
  std::string label_column;
  std::string positive_value;
  std::optional<std::string> group_column;
  std::vector<std::string> zero_as_missing;
  std::vector<std::string> drop_columns;
};

/// Reads a headered, comma-separated file. Every column other than the
/// label, group and dropped columns must be numeric. Throws
/// std::invalid_argument naming the row and column of the first problem.
Dataset load_dataset(const std::filesystem::path& path, const CsvSchema& schema, std::string name = "");

/// Two isotropic Gaussian blobs in d dimensions whose centres are
/// `separation` standard deviations apart. Labels alternate +1, -1, ...
Dataset make_blobs(std::size_t n, double separation, int d, std::uint64_t seed);

/// XOR quadrants in 2-D with Gaussian jitter `noise` around (+-1, +-1).
Dataset make_xor(std::size_t n, double noise, std::uint64_t seed);

/// Stratified subsample of `n` rows (class ratio preserved, largest
/// remainder rounding), returned in ascending row order.
std::vector<std::size_t> stratified_subsample(std::span<const int> y, std::size_t n, std::uint64_t seed);

}  // namespace qkb
