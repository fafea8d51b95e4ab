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
#include <numeric>
#include <stdexcept>

#include "qkbench/stats.hpp"

namespace qkb {

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("pearson: arrays differ in length");
  if (a.size() < 2) throw std::invalid_argument("pearson: need at least 2 points");
  const auto n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw std::invalid_argument("pearson: zero variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

SpearmanResult spearman(std::span<const double> a, std::span<const double> b, SpearmanPMethod method) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman: arrays differ in length");
  if (a.size() < 3) throw std::invalid_argument("spearman: need at least 3 points");
  const auto ra = average_ranks(a);
  auto rb = average_ranks(b);
  SpearmanResult res;
  res.rho = pearson(ra, rb);
  const std::size_t n = a.size();
  if (method == SpearmanPMethod::automatic) {
    method = n <= 8 ? SpearmanPMethod::exact : SpearmanPMethod::t_approx;
  }
  if (method == SpearmanPMethod::exact) {
    if (n > 10) throw std::invalid_argument("spearman: exact permutation limited to n <= 10");
    std::sort(rb.begin(), rb.end());
    std::size_t hits = 0;
    std::size_t total = 0;
    const double target = std::fabs(res.rho) - 1e-12;
    do {
      ++total;
      if (std::fabs(pearson(ra, rb)) >= target) ++hits;
    } while (std::next_permutation(rb.begin(), rb.end()));
    // next_permutation skips duplicate orderings; each distinct arrangement
    // of tied ranks is equally likely, so the ratio is still exact.
    res.p_value = static_cast<double>(hits) / static_cast<double>(total);
    res.method = "spearman-exact";
  } else {
    const double df = static_cast<double>(n) - 2.0;
    const double denom = 1.0 - res.rho * res.rho;
    res.p_value = denom <= 0.0 ? 0.0 : student_t_two_sided(res.rho * std::sqrt(df / denom), df);
    res.method = "spearman-t";
  }
  return res;
}

SpectralProfile spectral_profile(const Eigen::MatrixXd& K) {
  if (K.rows() != K.cols() || K.rows() == 0) throw std::invalid_argument("spectral_profile: matrix must be square");
  if (!K.allFinite()) throw std::invalid_argument("spectral_profile: non-finite entry");
  const double scale = std::max(K.cwiseAbs().maxCoeff(), 1e-300);
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw std::invalid_argument("spectral_profile: matrix is not symmetric");
  }
  const Eigen::MatrixXd S = 0.5 * (K + K.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("spectral_profile: eigensolver failed");
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), std::greater<>());

  const auto n = static_cast<double>(ev.size());
  const double radius = std::max(std::fabs(ev.front()), std::fabs(ev.back()));
  const double pos_floor = 1e-12 * radius;
  const double neg_floor = -1e-10 * radius;

  SpectralProfile p;
  p.eigenvalues = ev;
  double pos_sum = 0.0;
  std::size_t negatives = 0;
  for (double l : ev) {
    if (l > pos_floor) pos_sum += l;
    if (l < neg_floor) ++negatives;
  }
  p.negative_eig_fraction = static_cast<double>(negatives) / n;
  if (pos_sum > 0.0) {
    double h = 0.0;
    for (double l : ev) {
      if (l > pos_floor) {
        const double q = l / pos_sum;
        h -= q * std::log(q);
      }
    }
    p.effective_rank_ratio = std::exp(h) / n;
    double top = 0.0;
    for (std::size_t i = 0; i < ev.size() && i < 5; ++i) {
      if (ev[i] > pos_floor) top += ev[i];
      if (i == 0) p.top1_variance = top / pos_sum;
    }
    p.top5_variance = top / pos_sum;
  }
  const double diag_mean = S.diagonal().mean();
  double off_mean = 0.0;
  if (S.rows() > 1) off_mean = (S.sum() - S.diagonal().sum()) / (n * n - n);
  const double guard = std::max(std::fabs(off_mean), 1e-12 * std::max(std::fabs(diag_mean), 1e-300));
  p.diag_dominance = diag_mean / guard;
  return p;
}

double cov(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("cov: need at least 2 values");
  const auto n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (mean == 0.0) throw std::invalid_argument("cov: mean is zero");
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1)) / mean;
}

OlsResult ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("ols_slope: arrays differ in length");
  if (x.size() < 3) throw std::invalid_argument("ols_slope: need at least 3 points");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("ols_slope: x is constant");
  OlsResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (r.intercept + r.slope * x[i]);
    sse += e * e;
  }
  if (syy == 0.0) {
    r.slope = 0.0;
    r.p_two_sided = 1.0;
    return r;
  }
  // residuals at rounding level: the fit is exact
  if (sse <= 1e-26 * syy) {
    r.stderr_slope = 0.0;
    r.p_two_sided = 0.0;
    return r;
  }
  r.stderr_slope = std::sqrt(sse / (n - 2) / sxx);
  r.p_two_sided = student_t_two_sided(r.slope / r.stderr_slope, n - 2);
  return r;
}

}  // namespace qkb
