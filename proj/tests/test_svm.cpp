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

#include <cmath>
#include <map>
#include <numeric>

#include "oracles.hpp"
#include "qkbench/rng.hpp"
#include "qkbench/svm.hpp"

namespace qkb {
namespace {

using Eigen::MatrixXd;

struct Problem {
  MatrixXd K;
  std::vector<int> y;
};

Problem random_psd_problem(SplitMix64& rng, int n) {
  const int d = 1 + static_cast<int>(rng.below(4));
  MatrixXd F(n, d);
  for (Eigen::Index i = 0; i < F.size(); ++i) F.data()[i] = rng.normal();
  Problem p;
  if (rng.below(2) == 0) {
    p.K = F * F.transpose();
  } else {
    p.K.resize(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) p.K(i, j) = std::exp(-0.5 * (F.row(i) - F.row(j)).squaredNorm());
    }
  }
  p.y.resize(static_cast<std::size_t>(n));
  for (auto& v : p.y) v = rng.below(2) == 0 ? 1 : -1;
  p.y[0] = 1;
  p.y[1] = -1;
  return p;
}

double eq_residual(const SvmModel& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.alphas.size(); ++i) s += m.alphas[i] * m.labels[i];
  return std::abs(s);
}

// Pair-counting ROC-AUC with half credit for ties.
double auc_pairs(const std::vector<int>& y, const std::vector<double>& s) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[i] != 1 || y[j] != -1) continue;
      den += 1.0;
      num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return num / den;
}

// Step-wise average precision over distinct thresholds.
double average_precision(const std::vector<int>& y, const std::vector<double>& s) {
  std::map<double, std::pair<int, int>, std::greater<>> at;  // threshold -> (pos, total)
  int positives = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    at[s[i]].first += y[i] == 1;
    at[s[i]].second += 1;
    positives += y[i] == 1;
  }
  double ap = 0.0;
  int tp = 0;
  int seen = 0;
  for (const auto& [t, c] : at) {
    tp += c.first;
    seen += c.second;
    ap += (static_cast<double>(c.first) / positives) * (static_cast<double>(tp) / seen);
  }
  return ap;
}

TEST(Smo, SeparablePair) {
  MatrixXd K(2, 2);
  K << 1.0, -1.0, -1.0, 1.0;
  const std::vector<int> y{1, -1};
  for (double C : {1.0, 10.0}) {
    const SvmModel m = svm_train(K, y, C);
    EXPECT_EQ(m.support_indices.size(), 2U);
    EXPECT_EQ(svm_predict(m, K).labels, y);
    EXPECT_NEAR(m.alphas[0], 0.5, 1e-9);
  }
}

TEST(Smo, XorWithRbf) {
  MatrixXd P(4, 2);
  P << 1, 1, -1, -1, 1, -1, -1, 1;
  const std::vector<int> y{1, 1, -1, -1};
  MatrixXd K(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) K(i, j) = std::exp(-(P.row(i) - P.row(j)).squaredNorm());
  }
  const SvmModel m = svm_train(K, y, 10.0);
  const Prediction pr = svm_predict(m, K);
  EXPECT_EQ(pr.labels, y);
  EXPECT_DOUBLE_EQ(balanced_accuracy(y, pr.labels), 1.0);
  EXPECT_LT(eq_residual(m), 1e-8);
  EXPECT_NEAR(m.dual_objective, oracle::svm_dual_brute_force(K, y, 10.0), 1e-6);
}

// The default 1e-3 KKT stop leaves objective gaps near 1e-5, so the oracle
// comparison runs the solver to a tight tolerance.
TEST(Smo, MatchesBruteForceOracle) {
  const SmoOptions tight{1e-9, 100000, 1e-12};
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(7));
    const Problem p = random_psd_problem(rng, n);
    for (double C : {0.01, 1.0, 100.0}) {
      const SvmModel m = svm_train(p.K, p.y, C, tight);
      const double best = oracle::svm_dual_brute_force(p.K, p.y, C);
      EXPECT_NEAR(m.dual_objective, best, 1e-6) << "trial " << trial << " n=" << n << " C=" << C;
      EXPECT_NEAR(svm_dual_objective(p.K, p.y, m.alphas), m.dual_objective, 1e-12 * (1.0 + std::abs(best)));
      EXPECT_TRUE(m.converged);
      EXPECT_LT(eq_residual(m), 1e-8);
      for (double a : m.alphas) {
        EXPECT_GE(a, 0.0);
        EXPECT_LE(a, C);
      }
    }
  }
}

TEST(Smo, MarginsOnFreeSupportVectors) {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const Problem p = random_psd_problem(rng, 8);
    const double C = 1.0;
    const SvmModel m = svm_train(p.K, p.y, C);
    ASSERT_TRUE(m.converged);
    const Prediction pr = svm_predict(m, p.K);
    for (std::size_t i = 0; i < p.y.size(); ++i) {
      const double margin = p.y[i] * pr.decision_values[i];
      if (m.alphas[i] > 1e-8 && m.alphas[i] < C - 1e-8) {
        EXPECT_NEAR(margin, 1.0, 1e-3);
      }
      if (m.alphas[i] <= 1e-8) {
        EXPECT_GE(margin, 1.0 - 1e-3);
      }
      if (m.alphas[i] >= C - 1e-8) {
        EXPECT_LE(margin, 1.0 + 1e-3);
      }
    }
  }
}

TEST(Smo, ZeroCrossKernelGivesBias) {
  SplitMix64 rng(3);
  const Problem p = random_psd_problem(rng, 6);
  const SvmModel m = svm_train(p.K, p.y, 1.0);
  const Prediction pr = svm_predict(m, MatrixXd::Zero(3, 6));
  for (double v : pr.decision_values) EXPECT_EQ(v, m.bias);
  EXPECT_THROW(svm_predict(m, MatrixXd::Zero(3, 5)), std::invalid_argument);
}

TEST(Smo, ScalingInvariance) {
  SplitMix64 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const Problem p = random_psd_problem(rng, 8);
    const Prediction pref = svm_predict(svm_train(p.K, p.y, 1.0, {1e-9, 10000, 1e-12}), p.K);
    for (double c : {0.1, 4.0}) {
      const MatrixXd Kc = c * p.K;
      const SvmModel m = svm_train(Kc, p.y, 1.0 / c, {1e-9, 10000, 1e-12});
      const Prediction pr = svm_predict(m, Kc);
      for (std::size_t i = 0; i < p.y.size(); ++i) {
        // Labels only compare where the decision value is not at the sign boundary.
        if (std::abs(pref.decision_values[i]) > 1e-6) {
          EXPECT_EQ(pr.labels[i], pref.labels[i]);
        }
      }
    }
  }
}

TEST(Smo, Deterministic) {
  SplitMix64 rng(5);
  const Problem p = random_psd_problem(rng, 8);
  const SvmModel a = svm_train(p.K, p.y, 1.0);
  const SvmModel b = svm_train(p.K, p.y, 1.0);
  EXPECT_EQ(a.alphas, b.alphas);
  EXPECT_EQ(a.bias, b.bias);
}

TEST(Smo, IndefiniteKernelTerminates) {
  SplitMix64 rng(6);
  Problem p = random_psd_problem(rng, 8);
  p.K(0, 1) = p.K(1, 0) = p.K(0, 1) + 3.0;
  const SvmModel m = svm_train(p.K, p.y, 1.0);
  EXPECT_LT(eq_residual(m), 1e-8);
  for (double a : m.alphas) {
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
  }
}

TEST(Smo, InputErrors) {
  const MatrixXd K = MatrixXd::Identity(3, 3);
  EXPECT_THROW(svm_train(K, std::vector<int>{1, 1, 1}, 1.0), std::invalid_argument);
  EXPECT_THROW(svm_train(K, std::vector<int>{1, 0, -1}, 1.0), std::invalid_argument);
  EXPECT_THROW(svm_train(K, std::vector<int>{1, -1, 1}, 0.0), std::invalid_argument);
  MatrixXd bad = K;
  bad(0, 2) = std::nan("");
  EXPECT_THROW(svm_train(bad, std::vector<int>{1, -1, 1}, 1.0), std::invalid_argument);
}

TEST(Metrics, Examples) {
  const std::vector<int> y{1, 1, -1, -1};
  const MetricBundle perfect = compute_metrics(y, y, std::vector<double>{2, 1, -1, -2});
  EXPECT_DOUBLE_EQ(perfect.balanced_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(perfect.mcc, 1.0);
  EXPECT_DOUBLE_EQ(perfect.f1, 1.0);
  EXPECT_DOUBLE_EQ(*perfect.roc_auc, 1.0);
  EXPECT_DOUBLE_EQ(*perfect.pr_auc, 1.0);

  const std::vector<int> majority{-1, -1, -1, -1};
  const MetricBundle flat = compute_metrics(y, majority, std::vector<double>{0, 0, 0, 0});
  EXPECT_DOUBLE_EQ(flat.balanced_accuracy, 0.5);
  EXPECT_DOUBLE_EQ(flat.mcc, 0.0);
  EXPECT_DOUBLE_EQ(*flat.roc_auc, 0.5);

  // TP=2, FN=1, TN=3, FP=0.
  const std::vector<int> t{1, 1, 1, -1, -1, -1};
  const std::vector<int> p{1, 1, -1, -1, -1, -1};
  EXPECT_NEAR(balanced_accuracy(t, p), (2.0 / 3.0 + 1.0) / 2.0, 1e-15);
  EXPECT_THROW(compute_metrics({}, {}, {}), std::invalid_argument);
}

TEST(Metrics, SingleClassFoldHasNoRocAuc) {
  const std::vector<int> y{1, 1, 1};
  const MetricBundle m = compute_metrics(y, y, std::vector<double>{0.1, 0.2, 0.3});
  EXPECT_FALSE(m.roc_auc.has_value());
  const std::vector<int> n{-1, -1};
  EXPECT_FALSE(compute_metrics(n, n, std::vector<double>{0.1, 0.2}).pr_auc.has_value());
}

TEST(Metrics, MatchesOracles) {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(30);
    std::vector<int> y(n);
    std::vector<int> pred(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.below(2) == 0 ? 1 : -1;
      s[i] = static_cast<double>(rng.below(6)) - 2.5 + (y[i] == 1 ? 1.0 : 0.0);  // coarse grid forces ties
      pred[i] = s[i] >= 0 ? 1 : -1;
    }
    y[0] = 1;
    y[1] = -1;
    const MetricBundle m = compute_metrics(y, pred, s);
    double tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      tp += y[i] == 1 && pred[i] == 1;
      tn += y[i] == -1 && pred[i] == -1;
      fp += y[i] == -1 && pred[i] == 1;
      fn += y[i] == 1 && pred[i] == -1;
    }
    EXPECT_NEAR(m.balanced_accuracy, 0.5 * (tp / (tp + fn) + tn / (tn + fp)), 1e-15);
    const double f1 = tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
    EXPECT_NEAR(m.f1, f1, 1e-15);
    const double den = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
    EXPECT_NEAR(m.mcc, den == 0 ? 0.0 : (tp * tn - fp * fn) / den, 1e-12);
    ASSERT_TRUE(m.roc_auc && m.pr_auc);
    EXPECT_NEAR(*m.roc_auc, auc_pairs(y, s), 1e-12);
    EXPECT_NEAR(*m.pr_auc, average_precision(y, s), 1e-12);
    EXPECT_GE(m.mcc, -1.0);
    EXPECT_LE(m.mcc, 1.0);
  }
}

}  // namespace
}  // namespace qkb
