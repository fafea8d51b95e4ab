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
#include <array>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qkbench/stats.hpp"

namespace qkb {

double chi2_sf(double x, double df) {
  if (!(df > 0)) throw std::invalid_argument("chi2_sf: df must be positive");
  if (x <= 0) return 1.0;
  return boost::math::gamma_q(df / 2.0, x / 2.0);
}

double student_t_two_sided(double t, double df) {
  if (!(df > 0)) throw std::invalid_argument("student_t: df must be positive");
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace {

// sum over tie groups of (t^3 - t)
double tie_term(std::span<const double> values) {
  std::map<double, std::size_t> counts;
  for (double v : values) ++counts[v];
  double acc = 0.0;
  for (const auto& [_, t] : counts) {
    const auto td = static_cast<double>(t);
    acc += td * td * td - td;
  }
  return acc;
}

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite input");
  }
}

}  // namespace

// ---------------------------------------------------------------- Wilcoxon

TestReport wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("wilcoxon: arrays differ in length");
  if (a.size() < 2) throw std::invalid_argument("wilcoxon: need at least 2 pairs");
  require_finite(a, "wilcoxon");
  require_finite(b, "wilcoxon");

  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] - b[i] != 0.0) d.push_back(a[i] - b[i]);
  }
  TestReport rep;
  rep.n = d.size();
  if (d.empty()) {
    rep.method = "wilcoxon-degenerate";
    rep.statistic = 0.0;
    rep.p_value = 1.0;
    rep.degenerate = true;
    return rep;
  }
  std::vector<double> absd(d.size());
  std::transform(d.begin(), d.end(), absd.begin(), [](double x) { return std::fabs(x); });
  const auto ranks = average_ranks(absd);
  double w_plus = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    total += ranks[i];
    if (d[i] > 0) w_plus += ranks[i];
  }
  const double w_minus = total - w_plus;
  rep.statistic = std::min(w_plus, w_minus);
  const std::size_t m = d.size();

  if (m <= 25) {
    // Null distribution of the doubled positive-rank sum (average ranks are
    // multiples of 1/2), counted over all 2^m sign assignments.
    std::vector<long> r2(m);
    long s_total = 0;
    for (std::size_t i = 0; i < m; ++i) {
      r2[i] = std::lround(2.0 * ranks[i]);
      s_total += r2[i];
    }
    std::vector<double> count(static_cast<std::size_t>(s_total) + 1, 0.0);
    count[0] = 1.0;
    long reach = 0;
    for (long r : r2) {
      for (long s = reach; s >= 0; --s) {
        if (count[static_cast<std::size_t>(s)] != 0.0) count[static_cast<std::size_t>(s + r)] += count[static_cast<std::size_t>(s)];
      }
      reach += r;
    }
    const double n_assign = std::ldexp(1.0, static_cast<int>(m));
    const long t2 = std::lround(2.0 * w_plus);
    double le = 0.0;
    double ge = 0.0;
    for (long s = 0; s <= s_total; ++s) {
      if (s <= t2) le += count[static_cast<std::size_t>(s)];
      if (s >= t2) ge += count[static_cast<std::size_t>(s)];
    }
    rep.p_value = std::min(1.0, 2.0 * std::min(le, ge) / n_assign);
    rep.method = "wilcoxon-exact";
  } else {
    const auto md = static_cast<double>(m);
    const double mean = md * (md + 1) / 4.0;
    const double var = md * (md + 1) * (2 * md + 1) / 24.0 - tie_term(absd) / 48.0;
    const double z = var > 0 ? (w_plus - mean) / std::sqrt(var) : 0.0;
    rep.p_value = std::min(1.0, 2.0 * normal_sf(std::fabs(z)));
    rep.method = "wilcoxon-normal";
  }
  return rep;
}

// ---------------------------------------------------------------- Friedman

TestReport friedman(const Eigen::MatrixXd& scores) {
  const auto k = static_cast<std::size_t>(scores.rows());
  const auto n = static_cast<std::size_t>(scores.cols());
  if (k < 2 || n < 2) throw std::invalid_argument("friedman: need >= 2 methods and >= 2 blocks");
  if (!scores.allFinite()) throw std::invalid_argument("friedman: non-finite score");

  std::vector<double> rank_sum(k, 0.0);
  double ties = 0.0;
  for (std::size_t blk = 0; blk < n; ++blk) {
    std::vector<double> col(k);
    for (std::size_t j = 0; j < k; ++j) col[j] = scores(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(blk));
    const auto r = average_ranks(col);
    for (std::size_t j = 0; j < k; ++j) rank_sum[j] += r[j];
    ties += tie_term(col);
  }
  const auto kd = static_cast<double>(k);
  const auto nd = static_cast<double>(n);
  TestReport rep;
  rep.method = "friedman";
  rep.n = n;
  rep.df = kd - 1;
  rep.mean_ranks.resize(k);
  double sum_sq = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    rep.mean_ranks[j] = rank_sum[j] / nd;
    sum_sq += rep.mean_ranks[j] * rep.mean_ranks[j];
  }
  const double raw = 12.0 * nd / (kd * (kd + 1)) * sum_sq - 3.0 * nd * (kd + 1);
  const double correction = 1.0 - ties / (nd * (kd * kd * kd - kd));
  if (correction <= 1e-12) {
    rep.statistic = 0.0;
    rep.p_value = 1.0;
    rep.degenerate = true;
  } else {
    rep.statistic = std::max(0.0, raw / correction);
    rep.p_value = chi2_sf(rep.statistic, kd - 1);
  }
  rep.critical_difference = nemenyi(rep.mean_ranks, n).critical_difference;
  return rep;
}

double nemenyi_q05(std::size_t k) {
  // q_{0.05}(k, inf) / sqrt(2), k = 2..20
  static constexpr std::array<double, 19> table{1.960, 2.344, 2.569, 2.728, 2.850, 2.948, 3.031,
                                                3.102, 3.164, 3.219, 3.268, 3.313, 3.354, 3.391,
                                                3.426, 3.458, 3.489, 3.517, 3.544};
  if (k < 2 || k > 20) throw std::invalid_argument("nemenyi: table covers 2..20 methods");
  return table[k - 2];
}

NemenyiReport nemenyi(std::span<const double> mean_ranks, std::size_t n_blocks) {
  const std::size_t k = mean_ranks.size();
  NemenyiReport rep;
  rep.q_alpha = nemenyi_q05(k);
  const auto kd = static_cast<double>(k);
  rep.critical_difference = rep.q_alpha * std::sqrt(kd * (kd + 1) / (6.0 * static_cast<double>(n_blocks)));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const double diff = std::fabs(mean_ranks[a] - mean_ranks[b]);
      rep.pairs.push_back({a, b, diff, diff > rep.critical_difference});
    }
  }
  return rep;
}

// ---------------------------------------------------------------- Kruskal-Wallis

TestReport kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw std::invalid_argument("kruskal_wallis: need >= 2 groups");
  std::vector<double> pooled;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw std::invalid_argument("kruskal_wallis: group " + std::to_string(g) + " is empty");
    require_finite(groups[g], "kruskal_wallis");
    pooled.insert(pooled.end(), groups[g].begin(), groups[g].end());
  }
  const std::size_t n = pooled.size();
  if (n < 3) throw std::invalid_argument("kruskal_wallis: need at least 3 observations");
  const auto ranks = average_ranks(pooled);
  const auto nd = static_cast<double>(n);
  double acc = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double r = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) r += ranks[offset + i];
    acc += r * r / static_cast<double>(g.size());
    offset += g.size();
  }
  const double h_raw = 12.0 / (nd * (nd + 1)) * acc - 3.0 * (nd + 1);
  const double correction = 1.0 - tie_term(pooled) / (nd * nd * nd - nd);
  TestReport rep;
  rep.method = "kruskal-wallis";
  rep.n = n;
  rep.df = static_cast<double>(groups.size() - 1);
  if (correction <= 1e-12) {
    rep.statistic = 0.0;
    rep.p_value = 1.0;
    rep.degenerate = true;
  } else {
    rep.statistic = std::max(0.0, h_raw / correction);
    rep.p_value = chi2_sf(rep.statistic, *rep.df);
  }
  rep.effect_size = std::clamp(rep.statistic / (nd - 1), 0.0, 1.0);
  return rep;
}

}  // namespace qkb
