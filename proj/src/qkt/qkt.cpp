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

#include "qkbench/qkt.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

#include "qkbench/kern.hpp"

namespace qkb {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double centered_kta(const MatrixXd& K, std::span<const int> y) {
  const Index n = K.rows();
  if (K.cols() != n) throw std::invalid_argument("centered_kta: kernel must be square");
  if (static_cast<std::size_t>(n) != y.size()) throw std::invalid_argument("centered_kta: label count mismatch");
  if (n < 2) throw std::invalid_argument("centered_kta: need at least 2 samples");
  const VectorXd row_mean = K.rowwise().mean();
  const VectorXd col_mean = K.colwise().mean().transpose();
  const double all_mean = K.mean();
  MatrixXd Kc = K;
  Kc.colwise() -= row_mean;
  Kc.rowwise() -= col_mean.transpose();
  Kc.array() += all_mean;

  VectorXd yc(n);
  for (Index i = 0; i < n; ++i) yc(i) = static_cast<double>(y[static_cast<std::size_t>(i)]);
  yc.array() -= yc.mean();

  const double k_norm = Kc.norm();
  const double y_norm = yc.squaredNorm();  // ||yc yc^T||_F
  if (!(k_norm > 1e-14 * std::max(1.0, K.norm()))) {
    throw std::invalid_argument("centered_kta: centred kernel has zero norm (constant kernel)");
  }
  if (!(y_norm > 0.0)) throw std::invalid_argument("centered_kta: centred target has zero norm (one class)");
  const double v = yc.dot(Kc * yc) / (k_norm * y_norm);
  return std::clamp(v, -1.0, 1.0);
}

VectorXd box_central_difference(const Objective& f, const VectorXd& x, const VectorXd& lower, const VectorXd& upper,
                                double step) {
  VectorXd g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    VectorXd hi = x;
    VectorXd lo = x;
    hi(i) = std::min(x(i) + step, upper(i));
    lo(i) = std::max(x(i) - step, lower(i));
    g(i) = (f(hi) - f(lo)) / (hi(i) - lo(i));
  }
  return g;
}

namespace {

VectorXd project(const VectorXd& x, const VectorXd& lower, const VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

}  // namespace

// Internally minimises phi = -f.
BoxResult maximize_in_box(const Objective& f, const Gradient& grad, VectorXd x0, const VectorXd& lower,
                          const VectorXd& upper, const BoxOptions& opts) {
  const Index k = x0.size();
  if (lower.size() != k || upper.size() != k) throw std::invalid_argument("maximize_in_box: bound size mismatch");
  BoxResult res;
  VectorXd x = project(x0, lower, upper);
  double phi = -f(x);
  res.trace.push_back(-phi);
  VectorXd g;
  if (opts.max_iter > 0) g = -grad(x);

  std::deque<std::pair<VectorXd, VectorXd>> mem;
  auto pg_norm = [&](const VectorXd& xv, const VectorXd& gv) {
    return (project(xv - gv, lower, upper) - xv).lpNorm<Eigen::Infinity>();
  };

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (pg_norm(x, g) < opts.gtol) {
      res.converged = true;
      break;
    }
    std::vector<bool> active(static_cast<std::size_t>(k), false);
    for (Index i = 0; i < k; ++i) {
      active[static_cast<std::size_t>(i)] = (x(i) <= lower(i) && g(i) > 0) || (x(i) >= upper(i) && g(i) < 0);
    }
    auto mask = [&](VectorXd v) {
      for (Index i = 0; i < k; ++i) {
        if (active[static_cast<std::size_t>(i)]) v(i) = 0.0;
      }
      return v;
    };

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const bool steepest = mem.empty() || attempt == 1;
      VectorXd d;
      if (!steepest) {
        // two-loop recursion
        VectorXd q = mask(g);
        std::vector<double> alpha(mem.size());
        for (std::size_t m = mem.size(); m-- > 0;) {
          const auto& [s, yv] = mem[m];
          alpha[m] = s.dot(q) / yv.dot(s);
          q -= alpha[m] * yv;
        }
        const auto& [s_last, y_last] = mem.back();
        q *= s_last.dot(y_last) / y_last.squaredNorm();
        for (std::size_t m = 0; m < mem.size(); ++m) {
          const auto& [s, yv] = mem[m];
          const double beta = yv.dot(q) / yv.dot(s);
          q += (alpha[m] - beta) * s;
        }
        d = mask(-q);
        if (!(g.dot(d) < 0.0)) continue;
      } else {
        mem.clear();
        d = mask(-g);
        const double dn = d.lpNorm<Eigen::Infinity>();
        if (dn > 1.0) d /= dn;
      }
      double step = 1.0;
      for (int b = 0; b <= opts.max_backtracks; ++b, step *= 0.5) {
        const VectorXd xn = project(x + step * d, lower, upper);
        const VectorXd s = xn - x;
        if (s.lpNorm<Eigen::Infinity>() == 0.0) break;
        const double phin = -f(xn);
        if (phin <= phi + opts.armijo_c1 * g.dot(s) && phin < phi) {
          const VectorXd gn = -grad(xn);
          const VectorXd yv = gn - g;
          if (s.dot(yv) > 1e-10 * s.squaredNorm()) {
            mem.emplace_back(s, yv);
            if (static_cast<int>(mem.size()) > opts.memory) mem.pop_front();
          }
          x = xn;
          phi = phin;
          g = gn;
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      spdlog::debug("maximize_in_box: line search failed at iteration {}", it);
      break;
    }
    res.trace.push_back(-phi);
  }
  if (!res.converged && it == opts.max_iter && opts.max_iter > 0) res.converged = pg_norm(x, g) < opts.gtol;
  res.x = x;
  res.value = -phi;
  res.iterations = it;
  return res;
}

double kta_at(const MatrixXd& X, std::span<const int> y, FeatureMapSpec spec, std::span<const double> theta) {
  spec.theta = std::vector<double>(theta.begin(), theta.end());
  return centered_kta(quantum_kernel_ideal(X, spec).values, y);
}

VectorXd kta_gradient(const MatrixXd& X, std::span<const int> y, const FeatureMapSpec& spec,
                      std::span<const double> theta, double step) {
  const auto k = static_cast<Index>(theta.size());
  const Objective f = [&](const VectorXd& t) { return kta_at(X, y, spec, {t.data(), static_cast<std::size_t>(t.size())}); };
  const VectorXd x = Eigen::Map<const VectorXd>(theta.data(), k);
  return box_central_difference(f, x, VectorXd::Constant(k, kThetaLower), VectorXd::Constant(k, kThetaUpper), step);
}

QktResult optimize_theta(const MatrixXd& X_train, std::span<const int> y_train, const FeatureMapSpec& spec,
                         const QktOptions& opts) {
  spec.validate();
  if (X_train.cols() != spec.k) {
    throw std::invalid_argument("optimize_theta: data has " + std::to_string(X_train.cols()) + " features, map expects " +
                                std::to_string(spec.k));
  }
  const Index k = spec.k;
  const VectorXd lower = VectorXd::Constant(k, kThetaLower);
  const VectorXd upper = VectorXd::Constant(k, kThetaUpper);
  const Objective f = [&](const VectorXd& t) {
    return kta_at(X_train, y_train, spec, {t.data(), static_cast<std::size_t>(t.size())});
  };
  const Gradient grad = [&](const VectorXd& t) { return box_central_difference(f, t, lower, upper, opts.fd_step); };
  BoxOptions bo;
  bo.max_iter = opts.max_iter;
  bo.memory = opts.memory;
  bo.gtol = opts.gtol;
  const BoxResult r = maximize_in_box(f, grad, VectorXd::Ones(k), lower, upper, bo);

  QktResult out;
  out.theta_star.assign(r.x.data(), r.x.data() + r.x.size());
  out.kta_initial = r.trace.front();
  out.kta_final = r.value;
  out.iterations = r.iterations;
  out.converged = r.converged;
  out.kta_trace = r.trace;
  return out;
}

}  // namespace qkb
