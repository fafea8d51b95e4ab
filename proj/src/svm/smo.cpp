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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qkbench/svm.hpp"

namespace qkb {

namespace {

void check_problem(const Eigen::MatrixXd& K, std::span<const int> y, double C) {
  if (K.rows() != K.cols()) throw std::invalid_argument("svm_train: kernel must be square");
  if (static_cast<std::size_t>(K.rows()) != y.size()) {
    throw std::invalid_argument("svm_train: kernel size " + std::to_string(K.rows()) + " but " +
                                std::to_string(y.size()) + " labels");
  }
  if (!K.allFinite()) throw std::invalid_argument("svm_train: non-finite kernel entries");
  if (!(C > 0.0) || !std::isfinite(C)) throw std::invalid_argument("svm_train: C must be positive");
  bool pos = false;
  bool neg = false;
  for (int v : y) {
    if (v == 1) {
      pos = true;
    } else if (v == -1) {
      neg = true;
    } else {
      throw std::invalid_argument("svm_train: labels must be +1 or -1");
    }
  }
  if (!pos || !neg) throw std::invalid_argument("svm_train: both classes must be present");
}

}  // namespace

double svm_dual_objective(const Eigen::MatrixXd& K, std::span<const int> y, std::span<const double> alphas) {
  const std::size_t n = alphas.size();
  double lin = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lin += alphas[i];
    for (std::size_t j = 0; j < n; ++j) {
      quad += alphas[i] * alphas[j] * y[i] * y[j] * K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return lin - 0.5 * quad;
}

// Solver state follows the usual min-form dual: f(a) = 1/2 a'Qa - e'a,
// Q_ij = y_i y_j K_ij, gradient G = Qa - e.
SvmModel svm_train(const Eigen::MatrixXd& K, std::span<const int> y, double C, const SmoOptions& opts) {
  check_problem(K, y, C);
  const auto n = static_cast<std::size_t>(K.rows());
  std::vector<double> a(n, 0.0);
  std::vector<double> G(n, -1.0);
  auto q = [&](std::size_t i, std::size_t j) {
    return static_cast<double>(y[i] * y[j]) * K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  auto in_up = [&](std::size_t t) { return (y[t] == 1 && a[t] < C) || (y[t] == -1 && a[t] > 0.0); };
  auto in_low = [&](std::size_t t) { return (y[t] == 1 && a[t] > 0.0) || (y[t] == -1 && a[t] < C); };

  SvmModel model;
  model.C = C;
  const long max_iter = opts.max_passes * static_cast<long>(std::max<std::size_t>(n, 1));
  long iter = 0;
  for (; iter < max_iter; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n;
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * G[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    if (i == n || j == n || gmax - gmin < opts.tolerance) {
      model.converged = true;
      break;
    }

    const double old_ai = a[i];
    const double old_aj = a[j];
    const double kii = K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    const double kjj = K(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
    const double kij = K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    double quad = kii + kjj - 2.0 * kij;
    // Non-positive curvature: the pair objective is concave along the
    // feasible direction, so the tiny tau sends the step to the box edge.
    if (quad <= 0.0) quad = opts.tau;

    if (y[i] != y[j]) {
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0) {
        if (a[j] < 0) {
          a[j] = 0;
          a[i] = diff;
        }
      } else if (a[i] < 0) {
        a[i] = 0;
        a[j] = -diff;
      }
      if (diff > 0) {
        if (a[i] > C) {
          a[i] = C;
          a[j] = C - diff;
        }
      } else if (a[j] > C) {
        a[j] = C;
        a[i] = C + diff;
      }
    } else {
      const double delta = (G[i] - G[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > C) {
        if (a[i] > C) {
          a[i] = C;
          a[j] = sum - C;
        }
      } else if (a[j] < 0) {
        a[j] = 0;
        a[i] = sum;
      }
      if (sum > C) {
        if (a[j] > C) {
          a[j] = C;
          a[i] = sum - C;
        }
      } else if (a[i] < 0) {
        a[i] = 0;
        a[j] = sum;
      }
    }

    const double dai = a[i] - old_ai;
    const double daj = a[j] - old_aj;
    if (dai == 0.0 && daj == 0.0) {
      // no progress possible on the maximal violating pair
      break;
    }
    for (std::size_t t = 0; t < n; ++t) G[t] += q(t, i) * dai + q(t, j) * daj;
  }
  model.iterations = iter;

  // bias: average over free vectors, else midpoint of the feasible interval
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (a[t] >= C) {
      if (y[t] == -1) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else if (a[t] <= 0.0) {
      if (y[t] == 1) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double r = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
  model.bias = -r;

  model.alphas = a;
  model.labels.assign(y.begin(), y.end());
  for (std::size_t t = 0; t < n; ++t) {
    if (a[t] > 0.0) model.support_indices.push_back(t);
  }
  double obj = 0.0;
  for (std::size_t t = 0; t < n; ++t) obj += a[t] * (G[t] - 1.0);
  model.dual_objective = -0.5 * obj;
  return model;
}

Prediction svm_predict(const SvmModel& model, const Eigen::MatrixXd& K_cross) {
  if (static_cast<std::size_t>(K_cross.cols()) != model.alphas.size()) {
    throw std::invalid_argument("svm_predict: cross kernel has " + std::to_string(K_cross.cols()) +
                                " columns, model was trained on " + std::to_string(model.alphas.size()));
  }
  Prediction p;
  p.labels.resize(static_cast<std::size_t>(K_cross.rows()));
  p.decision_values.resize(p.labels.size());
  for (Eigen::Index t = 0; t < K_cross.rows(); ++t) {
    double f = model.bias;
    for (std::size_t i : model.support_indices) {
      f += model.alphas[i] * model.labels[i] * K_cross(t, static_cast<Eigen::Index>(i));
    }
    p.decision_values[static_cast<std::size_t>(t)] = f;
    p.labels[static_cast<std::size_t>(t)] = f >= 0.0 ? 1 : -1;
  }
  return p;
}

}  // namespace qkb
