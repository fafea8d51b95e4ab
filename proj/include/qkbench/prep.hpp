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
#include <span>
#include <string_view>
#include <vector>

namespace qkb {

// Per-fold preprocessing. Every fit_* function sees training rows only; the
// returned transform is a pure function of its fitted parameters.

enum class TransformKind { median_impute, standard_scale, minmax_scale, pca, nmf, tree_select };

std::string_view to_string(TransformKind kind);

struct FittedTransform {
  TransformKind kind = TransformKind::standard_scale;
  int k_in = 0;
  int k_out = 0;
  Eigen::VectorXd offset;             // imputation medians / means / minima / PCA mean
  Eigen::VectorXd scale;              // scalers
  Eigen::MatrixXd components;         // PCA: d x k loadings; NMF: k x d basis H
  Eigen::VectorXd explained_variance; // PCA eigenvalues, descending
  Eigen::VectorXd importances;        // tree: normalised Gini importances
  std::vector<int> columns;           // imputed columns / selected features

  [[nodiscard]] Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;
};

struct NmfOptions {
  int max_iter = 200;
  double tol = 1e-6;  // relative change of the Frobenius loss
  std::uint64_t seed = 42;
};

/// Median of the non-zero training values for each listed column; zeros in
/// those columns are treated as missing.
FittedTransform fit_median_imputer(const Eigen::MatrixXd& X, std::span<const int> columns);
/// Zero mean, unit population variance. Constant columns keep scale 1.
FittedTransform fit_standard_scaler(const Eigen::MatrixXd& X);
/// Maps each training column onto [0, 1]; constant columns keep scale 1.
FittedTransform fit_minmax_scaler(const Eigen::MatrixXd& X);
/// Top-k eigenvectors of the training covariance; each component's largest
/// magnitude loading is made positive.
FittedTransform fit_pca(const Eigen::MatrixXd& X, int k);
/// Frobenius-loss multiplicative updates. `loss_trace`, when non-null,
/// receives the loss after every iteration of the fit.
FittedTransform fit_nmf(const Eigen::MatrixXd& X, int k, const NmfOptions& opts = {},
                        std::vector<double>* loss_trace = nullptr);
/// CART (Gini, unlimited depth, min 2 samples to split, midpoint thresholds);
/// keeps the k features with the largest importances, lowest index on ties,
/// in ascending column order.
FittedTransform fit_tree_select(const Eigen::MatrixXd& X, std::span<const int> y, int k);

/// Normalised Gini importances of a fully grown deterministic CART tree.
Eigen::VectorXd gini_importances(const Eigen::MatrixXd& X, std::span<const int> y);

enum class Reducer { none, pca, nmf, tree };

std::string_view to_string(Reducer r);
Reducer reducer_from_string(std::string_view name);

struct PipelineSpec {
  Reducer reducer = Reducer::pca;
  int k = 4;
  std::vector<int> zero_as_missing;  // columns imputed with training medians
  NmfOptions nmf;
};

/// Imputer (optional) + scaler + reducer, fitted in order on training rows.
/// The scaler is min-max for NMF and standard otherwise. Reducer::none
/// yields standard scaling only.
class FittedPipeline {
 public:
  FittedPipeline() = default;
  explicit FittedPipeline(std::vector<FittedTransform> steps) : steps_(std::move(steps)) {}

  [[nodiscard]] Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;
  [[nodiscard]] const std::vector<FittedTransform>& steps() const { return steps_; }
  [[nodiscard]] int k_out() const;

 private:
  std::vector<FittedTransform> steps_;
};

FittedPipeline fit_pipeline(const PipelineSpec& spec, const Eigen::MatrixXd& X_train, std::span<const int> y_train);

/// Exact comparison of every fitted parameter (bitwise on doubles).
bool same_parameters(const FittedTransform& a, const FittedTransform& b);
bool same_parameters(const FittedPipeline& a, const FittedPipeline& b);

}  // namespace qkb
