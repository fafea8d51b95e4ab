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
#include "qkbench/dataset.hpp"
#include "qkbench/kern.hpp"
#include "qkbench/prep.hpp"
#include "qkbench/qkt.hpp"
#include "qkbench/sim.hpp"
#include "qkbench/stats.hpp"
#include "qkbench/svm.hpp"

namespace qkb {

inline const std::vector<double> kDefaultCGrid = {0.01, 0.1, 1.0, 10.0, 100.0};

std::string version_string();

// ---------------------------------------------------------------- fold plans

struct Split {
  std::vector<std::size_t> train;  // dataset row indices, ascending
  std::vector<std::size_t> test;
  friend bool operator==(const Split&, const Split&) = default;
};

struct FoldPlan {
  std::vector<Split> outer;
  std::vector<std::vector<Split>> inner;  // inner[f] partitions outer[f].train
  std::uint64_t seed = 42;
  int n_outer = 5;
  int n_inner = 3;
  friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

/// Stratified (optionally group-atomic) nested plan. Throws when a class has
/// fewer than n_outer members.
FoldPlan make_fold_plan(std::span<const int> y, const std::optional<std::vector<int>>& groups, int n_outer,
                        int n_inner, std::uint64_t seed);

/// Stratified k-way partition of `rows` (dataset indices) by round-robin
/// dealing of each shuffled class.
std::vector<Split> stratified_folds(std::span<const int> y, std::span<const std::size_t> rows, int k,
                                    std::uint64_t seed);

// ---------------------------------------------------------------- kernels

enum class KernelFamily { quantum, classical };

struct KernelConfig {
  KernelFamily family = KernelFamily::classical;
  FeatureMapKind map = FeatureMapKind::rot2dof;
  int reps = 2;
  bool noisy = false;
  NoiseModel noise = kDefaultNoise;
  bool qkt = false;
  QktOptions qkt_options;
  ClassicalKind classical = ClassicalKind::rbf_scale;

  [[nodiscard]] std::string label() const;
};

/// Train x train and test x train kernels on already transformed features.
struct FoldKernels {
  Eigen::MatrixXd train;
  Eigen::MatrixXd test;
  bool indefinite = false;
  double wall_time_s = 0.0;
  std::optional<QktResult> qkt;
};

FoldKernels compute_fold_kernels(const KernelConfig& cfg, const Eigen::MatrixXd& F_train, const Eigen::MatrixXd& F_test,
                                 std::span<const int> y_train, std::string_view dataset_name = "",
                                 const KernelCache* cache = nullptr);

// ---------------------------------------------------------------- nested CV

struct FoldResult {
  MetricBundle metrics;
  double chosen_C = 0.0;
  std::vector<double> inner_mean_ba;  // per C, NaN when every inner fold was missing
  std::vector<int> inner_valid;       // valid inner folds per C
  double kernel_time_s = 0.0;
  double fit_time_s = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  int k_features = 0;
  bool indefinite = false;
  bool svm_converged = true;
  std::optional<std::vector<double>> theta;
  std::optional<double> kta_initial;
  std::optional<double> kta_final;
  std::optional<SpectralProfile> spectrum;  // train kernel, when requested
};

struct ResultRecord {
  std::string config_hash;
  std::string dataset;
  std::string kernel;
  std::string reducer;
  int k = 0;
  std::vector<FoldResult> folds;
  std::vector<double> fold_ba;
  double mean_ba = 0.0;
  std::uint64_t seed = 42;
  std::string version;
  std::string timestamp;
};

/// Selects the C with the largest mean inner BA; ties go to more valid inner
/// folds, then to the smaller C. All-missing grids fall back to the smallest C.
std::size_t select_C(std::span<const double> mean_ba, std::span<const int> valid);

/// Inner-CV grid search on sub-matrices of the outer-train kernel. `inner`
/// holds dataset row indices; `outer_train` maps kernel rows to dataset rows.
void inner_grid_search(const Eigen::MatrixXd& K_train, std::span<const int> y_train,
                       std::span<const std::size_t> outer_train, std::span<const Split> inner,
                       std::span<const double> C_grid, std::vector<double>& mean_ba, std::vector<int>& valid);

struct NestedCvOptions {
  std::vector<double> C_grid = kDefaultCGrid;
  const KernelCache* cache = nullptr;
  std::string config_hash;
  bool spectra = false;  // attach the spectral profile of each train kernel
};

ResultRecord nested_cv(const Dataset& data, const PipelineSpec& pipeline, const KernelConfig& kernel,
                       const FoldPlan& plan, const NestedCvOptions& opts = {});

// ---------------------------------------------------------------- learning curves

inline const std::vector<double> kDefaultFractions = {0.1, 0.2, 0.3, 0.5, 0.7, 1.0};

struct LearningPoint {
  double fraction = 0.0;
  std::vector<std::optional<double>> fold_ba;  // missing when a class has < 2 samples
  std::optional<double> mean_ba;
  double mean_n_train = 0.0;
};

struct LearningCurve {
  std::vector<LearningPoint> points;
  std::optional<OlsResult> slope;  // BA on ln(n_train) over points with a mean
};

/// Nested stratified subsample of `rows` keeping ceil(fraction * n_c) per
/// class; smaller fractions are prefixes of larger ones. Ascending order.
std::vector<std::size_t> nested_fraction_subsample(std::span<const int> y, std::span<const std::size_t> rows,
                                                   double fraction, std::uint64_t seed);

/// Each fold reuses its full outer-train kernel, the C chosen by nested CV on
/// that fold, and slices sub-matrices for every fraction.
LearningCurve learning_curve(const Dataset& data, const PipelineSpec& pipeline, const KernelConfig& kernel,
                             const FoldPlan& plan, std::span<const double> fractions = kDefaultFractions,
                             const NestedCvOptions& opts = {});

// ---------------------------------------------------------------- seed sweep

struct SeedSweep {
  std::vector<std::uint64_t> seeds;
  std::vector<double> mean_ba;  // per seed
  double cov = 0.0;             // sample std / mean of the per-seed means
};

/// Kernel computed once on the whole dataset (preprocessing fitted on all
/// rows); only the fold plan seed varies.
SeedSweep seed_sweep(const Dataset& data, const PipelineSpec& pipeline, const KernelConfig& kernel,
                     std::span<const std::uint64_t> seeds, int n_outer = 5, int n_inner = 5,
                     std::span<const double> C_grid = kDefaultCGrid);

/// Same sweep on a precomputed full kernel.
SeedSweep seed_sweep_on_kernel(const Eigen::MatrixXd& K, std::span<const int> y,
                               const std::optional<std::vector<int>>& groups, std::span<const std::uint64_t> seeds,
                               int n_outer, int n_inner, std::span<const double> C_grid = kDefaultCGrid);

struct SeedComparison {
  int wins_a = 0;  // strict a > b
  int wins_b = 0;
  TestReport wilcoxon;
};

SeedComparison compare_seed_sweeps(const SeedSweep& a, const SeedSweep& b);

}  // namespace qkb
