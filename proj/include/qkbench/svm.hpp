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
#include <optional>
#include <span>
#include <vector>

namespace qkb {

struct SmoOptions {
  double tolerance = 1e-3;  // maximal KKT violation at termination
  long max_passes = 10000;  // one pass = n pair updates
  double tau = 1e-12;       // curvature threshold for the indefinite fallback
};

/// Soft-margin SVM in dual form trained on a precomputed kernel.
struct SvmModel {
  std::vector<double> alphas;
  std::vector<int> labels;  // +1 / -1
  double bias = 0.0;
  double C = 1.0;
  std::vector<std::size_t> support_indices;
  long iterations = 0;
  bool converged = false;
  double dual_objective = 0.0;  // max form: sum(alpha) - 1/2 alpha^T Q alpha
};

/// SMO with maximal-violating-pair selection (lowest index on ties).
/// K may be indefinite; non-positive pair curvature moves to the box edge.
/// Throws std::invalid_argument for single-class labels, labels outside
/// {-1, +1}, non-finite or non-square kernels, or C <= 0.
SvmModel svm_train(const Eigen::MatrixXd& K, std::span<const int> y, double C, const SmoOptions& opts = {});

struct Prediction {
  std::vector<int> labels;
  std::vector<double> decision_values;
};

/// f_t = sum_i alpha_i y_i K_cross(t, i) + b; label +1 when f_t >= 0.
Prediction svm_predict(const SvmModel& model, const Eigen::MatrixXd& K_cross);

/// Dual objective (max form) for arbitrary alphas; used by oracles and checks.
double svm_dual_objective(const Eigen::MatrixXd& K, std::span<const int> y, std::span<const double> alphas);

struct MetricBundle {
  double balanced_accuracy = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;
  std::optional<double> roc_auc;  // missing when y_true has one class
  std::optional<double> pr_auc;   // missing when y_true has no positives
};

MetricBundle compute_metrics(std::span<const int> y_true, std::span<const int> y_pred, std::span<const double> scores);

double balanced_accuracy(std::span<const int> y_true, std::span<const int> y_pred);

}  // namespace qkb
