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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkbench/circuit.hpp"
#include "qkbench/kern.hpp"
#include "qkbench/sim.hpp"

namespace qkb {

struct SourceScore {
  std::string source;  // "imported", "ideal", "noisy"
  std::vector<double> fold_ba;
  double mean_ba = 0.0;
  double best_C = 0.0;  // most frequently selected C, smaller on ties
};

struct BackendReport {
  std::size_t n = 0;
  KernelAgreement vs_ideal;
  std::optional<KernelAgreement> vs_noisy;
  std::vector<SourceScore> scores;
  double delta_pp = 0.0;  // (imported - ideal) mean BA, percentage points
  bool imported_indefinite = false;
  double imported_min_eigenvalue = 0.0;
};

/// Compares an externally produced kernel on `features` (already transformed
/// samples, one row per kernel row) with the ideal and, when `noise` is
/// given, the noisy simulated kernels. Downstream BA uses single-level
/// stratified 5-fold CV; each fold picks C by grid search on its own
/// training rows (resubstitution BA, smaller C on ties).
BackendReport validate_backend(const KernelMatrix& imported, const Eigen::MatrixXd& features, std::span<const int> y,
                               const FeatureMapSpec& spec, const std::optional<NoiseModel>& noise,
                               std::uint64_t seed = 42);

/// Downstream 5-fold score for one precomputed square kernel.
SourceScore score_kernel(const Eigen::MatrixXd& K, std::span<const int> y, std::string source, std::uint64_t seed,
                         int n_folds = 5);

}  // namespace qkb
