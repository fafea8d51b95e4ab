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
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qkb {

struct TestReport {
  double statistic = 0.0;
  double p_value = 1.0;
  std::string method;
  std::size_t n = 0;
  std::optional<double> df;
  std::optional<double> effect_size;  // epsilon^2 for Kruskal-Wallis
  std::optional<double> critical_difference;
  std::vector<double> mean_ranks;  // Friedman: per method
  bool degenerate = false;
};

// ---------------------------------------------------------------- distributions

/// Upper tail of chi^2 with `df` degrees of freedom.
double chi2_sf(double x, double df);
/// Two-sided tail of Student's t.
double student_t_two_sided(double t, double df);
/// Upper tail of the standard normal.
double normal_sf(double z);

// ---------------------------------------------------------------- ranks

/// 1-based ranks, ties receive the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> v);

// ---------------------------------------------------------------- tests

/// Two-sided Wilcoxon signed-rank test. Zero differences are dropped; exact
/// null distribution for up to 25 non-zero pairs, normal approximation with
/// tie correction above. All-zero differences give p = 1 and `degenerate`.
TestReport wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

/// Friedman test on a methods x blocks score matrix (ranks within each block,
/// averaged on ties, tie-corrected statistic).
TestReport friedman(const Eigen::MatrixXd& scores);

struct NemenyiPair {
  std::size_t a = 0;
  std::size_t b = 0;
  double rank_difference = 0.0;
  bool significant = false;
};

struct NemenyiReport {
  double critical_difference = 0.0;
  double q_alpha = 0.0;
  std::vector<NemenyiPair> pairs;
};

/// Studentized-range quantile q_{0.05,k,inf}/sqrt(2) for 2 <= k <= 20.
double nemenyi_q05(std::size_t k);

/// Pairwise Nemenyi comparison at alpha = 0.05 from Friedman mean ranks.
NemenyiReport nemenyi(std::span<const double> mean_ranks, std::size_t n_blocks);

/// Kruskal-Wallis H with tie correction; effect_size = H / (n - 1).
TestReport kruskal_wallis(const std::vector<std::vector<double>>& groups);

// ---------------------------------------------------------------- correlation

double pearson(std::span<const double> a, std::span<const double> b);

enum class SpearmanPMethod { automatic, exact, t_approx };

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;
  std::string method;
};

/// Spearman rank correlation via average ranks. `automatic` uses exact
/// permutation for n <= 8 and the t approximation otherwise.
SpearmanResult spearman(std::span<const double> a, std::span<const double> b,
                        SpearmanPMethod method = SpearmanPMethod::automatic);

// ---------------------------------------------------------------- spectra

struct SpectralProfile {
  double effective_rank_ratio = 0.0;
  double top1_variance = 0.0;
  double top5_variance = 0.0;
  double diag_dominance = 0.0;
  double negative_eig_fraction = 0.0;
  std::vector<double> eigenvalues;  // descending
};

/// Throws std::invalid_argument if K is not symmetric to 1e-8 (relative to
/// its largest entry). Eigenvalue thresholds are relative to the spectral
/// radius so the profile is invariant to positive rescaling of K.
SpectralProfile spectral_profile(const Eigen::MatrixXd& K);

// ---------------------------------------------------------------- descriptive

/// Sample standard deviation over mean.
double cov(std::span<const double> values);

struct OlsResult {
  double slope = 0.0;
  double intercept = 0.0;
  double p_two_sided = 1.0;
  double stderr_slope = 0.0;
};

OlsResult ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace qkb
