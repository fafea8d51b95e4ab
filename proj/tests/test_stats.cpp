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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "qkbench/rng.hpp"
#include "qkbench/stats.hpp"

#include <Eigen/Eigenvalues>

namespace qkb {
namespace {

using Eigen::MatrixXd;

// Regularised upper incomplete gamma Q(a, x): power series for x < a + 1,
// Lentz continued fraction otherwise.
double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 1; n < 10000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - lg) * h;
}

TEST(Stats, AverageRanks) {
  const std::vector<double> v{3.0, 1.0, 3.0, 2.0, 3.0};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{4.0, 1.0, 4.0, 2.0, 4.0}));
}

TEST(Wilcoxon, FiveSameSignPairs) {
  const std::vector<double> a{0.9, 0.8, 0.85, 0.7, 0.95};
  const std::vector<double> b{0.8, 0.7, 0.80, 0.6, 0.90};
  const TestReport r = wilcoxon_signed_rank(a, b);
  EXPECT_EQ(r.p_value, 0.0625);
  EXPECT_EQ(r.n, 5U);
  EXPECT_EQ(wilcoxon_signed_rank(b, a).p_value, 0.0625);
}

TEST(Wilcoxon, IdenticalIsDegenerate) {
  const std::vector<double> a{0.1, 0.2, 0.3};
  const TestReport r = wilcoxon_signed_rank(a, a);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(Wilcoxon, MatchesEnumerationOracle) {
  SplitMix64 rng(12);
  for (int m = 2; m <= 12; ++m) {
    for (int trial = 0; trial < 15; ++trial) {
      // Integer-valued differences so ties and zeros are exact.
      std::vector<double> a(static_cast<std::size_t>(m));
      std::vector<double> b(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) {
        a[static_cast<std::size_t>(i)] = static_cast<double>(rng.below(9));
        b[static_cast<std::size_t>(i)] = static_cast<double>(rng.below(9));
      }
      std::vector<double> absd;
      std::vector<double> d;
      for (int i = 0; i < m; ++i) {
        const double diff = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
        if (diff != 0.0) {
          d.push_back(diff);
          absd.push_back(std::abs(diff));
        }
      }
      const TestReport r = wilcoxon_signed_rank(a, b);
      if (d.empty()) {
        EXPECT_TRUE(r.degenerate);
        continue;
      }
      const std::vector<double> ranks = oracle::average_ranks(absd);
      double w_plus = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] > 0) w_plus += ranks[i];
      }
      EXPECT_NEAR(r.p_value, oracle::wilcoxon_enumerated(ranks, w_plus), 1e-12) << "m=" << m;
      EXPECT_EQ(r.n, d.size());
    }
  }
}

TEST(Wilcoxon, LargeSampleUsesNormalApproximation) {
  SplitMix64 rng(3);
  std::vector<double> a(40);
  std::vector<double> b(40);
  for (std::size_t i = 0; i < 40; ++i) {
    a[i] = rng.normal() + 0.5;
    b[i] = rng.normal();
  }
  const TestReport r = wilcoxon_signed_rank(a, b);
  EXPECT_NE(r.method.find("normal"), std::string::npos);
  EXPECT_GE(r.p_value, 0.0);
  EXPECT_LE(r.p_value, 1.0);
}

TEST(Friedman, OrderedBlocks) {
  MatrixXd s(3, 4);
  s << 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3;
  const TestReport r = friedman(s);
  EXPECT_NEAR(r.statistic, 8.0, 1e-12);
  ASSERT_TRUE(r.df);
  EXPECT_EQ(*r.df, 2.0);
  EXPECT_NEAR(r.p_value, std::exp(-4.0), 1e-12);  // chi2 df=2 tail is exp(-x/2)
  EXPECT_EQ(r.mean_ranks, (std::vector<double>{1.0, 2.0, 3.0}));
}

TEST(Friedman, IdenticalMethods) {
  const MatrixXd s = MatrixXd::Constant(4, 5, 0.7);
  const TestReport r = friedman(s);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(Friedman, ReferenceValueAndPermutationSymmetry) {
  MatrixXd s(4, 6);
  s << 0.9, 0.8, 0.85, 0.7, 0.95, 0.6,  //
      0.85, 0.82, 0.80, 0.72, 0.90, 0.61,  //
      0.7, 0.75, 0.7, 0.65, 0.8, 0.55,  //
      0.9, 0.81, 0.86, 0.71, 0.93, 0.6;
  const TestReport r = friedman(s);
  // scipy.stats.friedmanchisquare on the same matrix.
  EXPECT_NEAR(r.statistic, 11.379310344827585, 1e-10);
  EXPECT_NEAR(r.p_value, 0.009842054929549015, 1e-10);
  MatrixXd p = s;
  p.row(0).swap(p.row(2));
  EXPECT_NEAR(friedman(p).statistic, r.statistic, 1e-12);
  EXPECT_THROW(friedman(MatrixXd::Zero(1, 3)), std::invalid_argument);
}

TEST(Nemenyi, CriticalDifference) {
  // q values are studentized-range quantiles / sqrt(2).
  EXPECT_NEAR(nemenyi_q05(2), 1.9599639845400534, 1e-3);
  EXPECT_NEAR(nemenyi_q05(4), 2.569031772546482, 1e-3);
  EXPECT_NEAR(nemenyi_q05(10), 3.163683577053373, 1e-3);
  EXPECT_NEAR(nemenyi_q05(20), 3.5437991315177815, 1e-3);
  const std::vector<double> ranks{1.0, 2.0, 3.5, 3.5};
  const NemenyiReport r = nemenyi(ranks, 10);
  EXPECT_NEAR(r.critical_difference, r.q_alpha * std::sqrt(4.0 * 5.0 / (6.0 * 10.0)), 1e-12);
  EXPECT_EQ(r.pairs.size(), 6U);
  for (const auto& p : r.pairs) EXPECT_EQ(p.significant, p.rank_difference > r.critical_difference);
  EXPECT_THROW(nemenyi_q05(21), std::invalid_argument);
}

TEST(KruskalWallis, Examples) {
  const TestReport same = kruskal_wallis({{1, 2, 3}, {1, 2, 3}});
  EXPECT_NEAR(same.statistic, 0.0, 1e-12);
  EXPECT_NEAR(*same.effect_size, 0.0, 1e-12);

  const TestReport sep = kruskal_wallis({{1, 2, 3}, {4, 5, 6}});
  EXPECT_NEAR(sep.statistic, 12.0 / 42.0 * (36.0 / 3 + 225.0 / 3) - 21.0, 1e-12);
  EXPECT_NEAR(sep.statistic, 3.857142857142857, 1e-12);
  EXPECT_EQ(*sep.df, 1.0);

  const TestReport ref = kruskal_wallis({{0.5, 0.6, 0.7, 0.7}, {0.8, 0.9, 0.85}, {0.55, 0.65, 0.9, 0.95, 0.6}});
  // scipy.stats.kruskal on the same groups.
  EXPECT_NEAR(ref.statistic, 3.0664605418139113, 1e-10);
  EXPECT_NEAR(ref.p_value, 0.21583732697105232, 1e-10);
  EXPECT_NEAR(*ref.effect_size, ref.statistic / 11.0, 1e-12);
  EXPECT_THROW(kruskal_wallis({{1, 2}, {}}), std::invalid_argument);
}

TEST(KruskalWallis, EffectSizeBounded) {
  SplitMix64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<double>> g(2 + rng.below(4));
    for (auto& grp : g) {
      grp.resize(1 + rng.below(6));
      for (double& v : grp) v = static_cast<double>(rng.below(5));
    }
    std::size_t total = 0;
    for (const auto& grp : g) total += grp.size();
    if (total < 3) continue;
    bool all_same = true;
    for (const auto& grp : g) {
      for (double v : grp) all_same = all_same && v == g[0][0];
    }
    if (all_same) continue;
    const TestReport r = kruskal_wallis(g);
    EXPECT_GE(*r.effect_size, 0.0);
    EXPECT_LE(*r.effect_size, 1.0 + 1e-12);
    EXPECT_GE(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
  }
}

TEST(Correlation, Examples) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> up{2, 4, 5, 8, 100};
  const std::vector<double> down{9, 7, 5, 3, -100};
  EXPECT_NEAR(spearman(x, up).rho, 1.0, 1e-15);
  EXPECT_NEAR(spearman(x, down).rho, -1.0, 1e-15);
  EXPECT_NEAR(pearson(x, x), 1.0, 1e-15);
  EXPECT_THROW(pearson(x, std::vector<double>{1, 1, 1, 1, 1}), std::invalid_argument);
  EXPECT_THROW(spearman(std::vector<double>{1, 2}, std::vector<double>{2, 1}), std::invalid_argument);
}

TEST(Correlation, SpearmanReferenceValues) {
  const std::vector<double> a{1, 2, 3, 4, 5, 6};
  const std::vector<double> b{2, 1, 4, 3, 6, 5};
  const SpearmanResult s = spearman(a, b);
  EXPECT_NEAR(s.rho, 0.8285714285714287, 1e-12);
  EXPECT_NEAR(s.p_value, 0.058333333333333334, 1e-12);  // 42/720 permutations
  EXPECT_EQ(s.method, "spearman-exact");

  const std::vector<double> x{0.017, 0.017, -0.008, -0.008, 0.05, 0.1, 0.02, 0.03, 0.0};
  const std::vector<double> y{0.01, 0.02, -0.03, 0.0, 0.04, 0.09, 0.05, -0.01, 0.005};
  const SpearmanResult t = spearman(x, y);
  // scipy.stats.spearmanr (t approximation) on the same data.
  EXPECT_NEAR(t.rho, 0.6975036196572949, 1e-12);
  EXPECT_NEAR(t.p_value, 0.036722324744514964, 1e-10);
}

TEST(Correlation, SpearmanMonotoneInvariance) {
  SplitMix64 rng(5);
  std::vector<double> a(12);
  std::vector<double> b(12);
  for (std::size_t i = 0; i < 12; ++i) {
    a[i] = rng.normal();
    b[i] = a[i] + rng.normal();
  }
  std::vector<double> ea(12);
  std::transform(a.begin(), a.end(), ea.begin(), [](double v) { return std::exp(3 * v); });
  EXPECT_NEAR(spearman(ea, b).rho, spearman(a, b).rho, 1e-14);
}

TEST(Distributions, ChiSquareCrossEvaluation) {
  double worst = 0.0;
  for (int df = 1; df <= 50; ++df) {
    for (double x = 0.0; x <= 200.0; x += 0.5) {
      worst = std::max(worst, std::abs(chi2_sf(x, df) - gamma_q(df / 2.0, x / 2.0)));
    }
  }
  EXPECT_LT(worst, 1e-10);
  EXPECT_NEAR(student_t_two_sided(2.1, 7), 0.0738711962129226, 1e-12);
  EXPECT_NEAR(normal_sf(1.7), 0.04456546275854304, 1e-14);
}

TEST(Spectral, IdentityAndRankOne) {
  for (int n : {1, 2, 10, 100, 500}) {
    EXPECT_NEAR(spectral_profile(MatrixXd::Identity(n, n)).effective_rank_ratio, 1.0, 1e-9) << n;
    const SpectralProfile p = spectral_profile(MatrixXd::Constant(n, n, 1.0 / n));
    EXPECT_NEAR(p.effective_rank_ratio, 1.0 / n, 1e-9) << n;
    EXPECT_NEAR(p.top1_variance, 1.0, 1e-9);
  }
}

TEST(Spectral, DiagonalDominanceExample) {
  const MatrixXd K = MatrixXd::Identity(6, 6) + 0.5 * (MatrixXd::Ones(6, 6) - MatrixXd::Identity(6, 6));
  EXPECT_NEAR(spectral_profile(K).diag_dominance, 2.0, 1e-12);
}

TEST(Spectral, EntropyOracleAndScaleInvariance) {
  SplitMix64 rng(6);
  MatrixXd F(30, 8);
  for (Eigen::Index i = 0; i < F.size(); ++i) F.data()[i] = rng.normal();
  MatrixXd K = F * F.transpose();
  K(0, 1) = K(1, 0) = K(0, 1) + 40.0;  // one negative eigenvalue
  const SpectralProfile p = spectral_profile(K);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(K);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + 30);
  std::sort(ev.rbegin(), ev.rend());
  const double radius = std::max(std::abs(ev.front()), std::abs(ev.back()));
  double pos = 0.0;
  int neg = 0;
  for (double l : ev) {
    if (l > 1e-12 * radius) pos += l;
    if (l < -1e-10 * radius) ++neg;
  }
  double h = 0.0;
  for (double l : ev) {
    if (l > 1e-12 * radius) h -= (l / pos) * std::log(l / pos);
  }
  EXPECT_NEAR(p.effective_rank_ratio, std::exp(h) / 30.0, 1e-12);
  EXPECT_NEAR(p.negative_eig_fraction, neg / 30.0, 1e-15);
  EXPECT_GT(neg, 0);
  EXPECT_NEAR(p.top5_variance, (ev[0] + ev[1] + ev[2] + ev[3] + ev[4]) / pos, 1e-12);
  for (double c : {1e-3, 1.0, 1e3}) {
    const SpectralProfile q = spectral_profile(c * K);
    EXPECT_NEAR(q.effective_rank_ratio, p.effective_rank_ratio, 1e-9);
    EXPECT_NEAR(q.top1_variance, p.top1_variance, 1e-9);
    EXPECT_NEAR(q.top5_variance, p.top5_variance, 1e-9);
    EXPECT_NEAR(q.diag_dominance, p.diag_dominance, 1e-9 * std::abs(p.diag_dominance));
    EXPECT_EQ(q.negative_eig_fraction, p.negative_eig_fraction);
  }
  MatrixXd asym = K;
  asym(2, 3) += 1.0;
  EXPECT_THROW(spectral_profile(asym), std::invalid_argument);
}

TEST(Descriptive, Cov) {
  EXPECT_EQ(cov(std::vector<double>{2, 2, 2}), 0.0);
  EXPECT_NEAR(cov(std::vector<double>{1, 3}), std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_NEAR(cov(std::vector<double>{0.80, 0.82}), 0.017459426695, 1e-11);
  EXPECT_NEAR(cov(std::vector<double>{4, 5, 9}), cov(std::vector<double>{40, 50, 90}), 1e-15);
  EXPECT_THROW(cov(std::vector<double>{-1, 1}), std::invalid_argument);
}

TEST(Descriptive, Ols) {
  const std::vector<double> x{1, 2, 3, 4, 5, 6};
  std::vector<double> y(6);
  for (std::size_t i = 0; i < 6; ++i) y[i] = 0.05 * x[i] + 0.2;
  const OlsResult r = ols_slope(x, y);
  EXPECT_NEAR(r.slope, 0.05, 1e-12);
  EXPECT_NEAR(r.intercept, 0.2, 1e-12);
  EXPECT_EQ(ols_slope(x, std::vector<double>(6, 0.7)).slope, 0.0);

  const std::vector<double> px{4, 1, 6, 3, 2, 5};
  const std::vector<double> py{0.5, 0.1, 0.9, 0.35, 0.3, 0.6};
  const std::vector<double> qx{1, 2, 3, 4, 5, 6};
  const std::vector<double> qy{0.1, 0.3, 0.35, 0.5, 0.6, 0.9};
  EXPECT_NEAR(ols_slope(px, py).slope, ols_slope(qx, qy).slope, 1e-14);
  EXPECT_NEAR(ols_slope(px, py).p_two_sided, ols_slope(qx, qy).p_two_sided, 1e-12);
  EXPECT_THROW(ols_slope(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), std::invalid_argument);
}

}  // namespace
}  // namespace qkb
