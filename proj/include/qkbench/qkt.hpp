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
#include <functional>
#include <span>
#include <vector>

#include "qkbench/circuit.hpp"

namespace qkb {

/// <HKH, H yy^T H>_F / (||HKH||_F ||H yy^T H||_F), H = I - 11^T / N.
/// Throws std::invalid_argument when either centred matrix has zero norm.
double centered_kta(const Eigen::MatrixXd& K, std::span<const int> y);

struct BoxOptions {
  int max_iter = 170;
  int memory = 10;
  double gtol = 1e-5;      // projected-gradient infinity norm
  double armijo_c1 = 1e-4;
  int max_backtracks = 30;
};

struct BoxResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // objective at the start point and every accepted iterate
};

using Objective = std::function<double(const Eigen::VectorXd&)>;
using Gradient = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Limited-memory quasi-Newton maximisation on a box with projected
/// backtracking (Armijo) line search. Curvature pairs with s'y <= 1e-10 s's
/// are skipped.
BoxResult maximize_in_box(const Objective& f, const Gradient& grad, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                          const Eigen::VectorXd& upper, const BoxOptions& opts = {});

/// Central differences clipped to the box: (f(min(x+h,U)) - f(max(x-h,L))) / width.
Eigen::VectorXd box_central_difference(const Objective& f, const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                                       const Eigen::VectorXd& upper, double step);

struct QktResult {
  std::vector<double> theta_star;
  double kta_initial = 0.0;
  double kta_final = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> kta_trace;
};

struct QktOptions {
  int max_iter = 170;
  double fd_step = 1e-6;
  double gtol = 1e-5;
  int memory = 10;
};

/// Centred KTA of the ideal-pathway train kernel at per-feature scaling theta.
double kta_at(const Eigen::MatrixXd& X, std::span<const int> y, FeatureMapSpec spec, std::span<const double> theta);

/// Finite-difference gradient of kta_at with the given step.
Eigen::VectorXd kta_gradient(const Eigen::MatrixXd& X, std::span<const int> y, const FeatureMapSpec& spec,
                             std::span<const double> theta, double step);

/// Maximises centred KTA over theta in [0.01, 5]^k from theta0 = 1.
QktResult optimize_theta(const Eigen::MatrixXd& X_train, std::span<const int> y_train, const FeatureMapSpec& spec,
                         const QktOptions& opts = {});

}  // namespace qkb
