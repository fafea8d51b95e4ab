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
#include <chrono>
#include <limits>
#include <cmath>
#include <ctime>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkbench/kern.hpp"
#include "qkbench/parallel.hpp"
#include "qkbench/stats.hpp"

namespace qkb {

std::string_view to_string(Pathway p) {
  switch (p) {
    case Pathway::ideal: return "ideal";
    case Pathway::noisy: return "noisy";
    case Pathway::classical: return "classical";
    case Pathway::imported: return "imported";
  }
  return "?";
}

Pathway pathway_from_string(std::string_view name) {
  if (name == "ideal") return Pathway::ideal;
  if (name == "noisy") return Pathway::noisy;
  if (name == "classical") return Pathway::classical;
  if (name == "imported") return Pathway::imported;
  throw std::invalid_argument("unknown kernel pathway '" + std::string(name) + "'");
}

std::string_view to_string(ClassicalKind kind) {
  switch (kind) {
    case ClassicalKind::linear: return "linear";
    case ClassicalKind::rbf_scale: return "rbf";
    case ClassicalKind::poly3: return "poly3";
  }
  return "?";
}

ClassicalKind classical_from_string(std::string_view name) {
  if (name == "linear") return ClassicalKind::linear;
  if (name == "rbf" || name == "rbf_scale") return ClassicalKind::rbf_scale;
  if (name == "poly3" || name == "poly") return ClassicalKind::poly3;
  throw std::invalid_argument("unknown classical kernel '" + std::string(name) + "'");
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_features(const Matrix& X, const FeatureMapSpec& spec, const char* side) {
  if (X.cols() != spec.k) {
    throw std::invalid_argument(std::string(side) + " has " + std::to_string(X.cols()) +
                                " columns, feature map expects k=" + std::to_string(spec.k));
  }
  if (!X.allFinite()) throw std::invalid_argument(std::string(side) + " contains non-finite features");
}

std::vector<double> row_of(const Matrix& X, Eigen::Index i) {
  std::vector<double> r(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) r[static_cast<std::size_t>(j)] = X(i, j);
  return r;
}

std::vector<Statevector> embed_pure(const Matrix& X, const FeatureMapSpec& spec) {
  std::vector<Statevector> out(static_cast<std::size_t>(X.rows()), Statevector(spec.n_qubits()));
  parallel_for(out.size(), [&](std::size_t i) {
    const auto x = row_of(X, static_cast<Eigen::Index>(i));
    out[i] = run_statevector(build_feature_map(spec, x));
  });
  return out;
}

std::vector<DensityMatrix> embed_mixed(const Matrix& X, const FeatureMapSpec& spec, const NoiseModel& noise) {
  std::vector<DensityMatrix> out(static_cast<std::size_t>(X.rows()), DensityMatrix(1));
  parallel_for(out.size(), [&](std::size_t i) {
    const auto x = row_of(X, static_cast<Eigen::Index>(i));
    out[i] = run_density(build_feature_map(spec, x), noise);
  });
  return out;
}

template <typename State, typename Entry>
Matrix cross_entries(const std::vector<State>& left, const std::vector<State>& right, Entry entry) {
  Matrix K(static_cast<Eigen::Index>(left.size()), static_cast<Eigen::Index>(right.size()));
  parallel_for(left.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < right.size(); ++j) {
      K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = entry(left[i], right[j]);
    }
  });
  return K;
}

template <typename State, typename Entry>
Matrix gram_entries(const std::vector<State>& states, Entry entry) {
  const auto n = static_cast<Eigen::Index>(states.size());
  Matrix K(n, n);
  parallel_for(states.size(), [&](std::size_t i) {
    for (std::size_t j = i; j < states.size(); ++j) {
      K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = entry(states[i], states[j]);
    }
  });
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) K(i, j) = K(j, i);
  }
  return K;
}

double fidelity(const Statevector& a, const Statevector& b) { return std::norm(a.inner(b)); }
double hs(const DensityMatrix& a, const DensityMatrix& b) { return a.hs_inner(b); }

KernelMatrix finish(Matrix values, Pathway pathway, const NoiseModel& noise, Clock::time_point t0) {
  KernelMatrix K;
  K.values = std::move(values);
  K.provenance.pathway = pathway;
  K.provenance.noise = noise;
  K.provenance.timestamp = utc_timestamp();
  K.provenance.wall_time_s = seconds_since(t0);
  return K;
}

}  // namespace

KernelMatrix quantum_kernel_ideal(const Matrix& X, const Matrix& Z, const FeatureMapSpec& spec) {
  const auto t0 = Clock::now();
  spec.validate();
  check_features(X, spec, "left sample set");
  check_features(Z, spec, "right sample set");
  const auto left = embed_pure(X, spec);
  const auto right = embed_pure(Z, spec);
  return finish(cross_entries(left, right, fidelity), Pathway::ideal, {}, t0);
}

KernelMatrix quantum_kernel_ideal(const Matrix& X, const FeatureMapSpec& spec) {
  const auto t0 = Clock::now();
  spec.validate();
  check_features(X, spec, "sample set");
  return finish(gram_entries(embed_pure(X, spec), fidelity), Pathway::ideal, {}, t0);
}

KernelMatrix quantum_kernel_noisy(const Matrix& X, const Matrix& Z, const FeatureMapSpec& spec,
                                  const NoiseModel& noise) {
  const auto t0 = Clock::now();
  spec.validate();
  noise.validate();
  check_features(X, spec, "left sample set");
  check_features(Z, spec, "right sample set");
  const auto left = embed_mixed(X, spec, noise);
  const auto right = embed_mixed(Z, spec, noise);
  return finish(cross_entries(left, right, hs), Pathway::noisy, noise, t0);
}

KernelMatrix quantum_kernel_noisy(const Matrix& X, const FeatureMapSpec& spec, const NoiseModel& noise) {
  const auto t0 = Clock::now();
  spec.validate();
  noise.validate();
  check_features(X, spec, "sample set");
  return finish(gram_entries(embed_mixed(X, spec, noise), hs), Pathway::noisy, noise, t0);
}

double rbf_scale_gamma(const Matrix& X_train, std::string_view name) {
  if (X_train.size() == 0) throw std::invalid_argument("gamma 'scale' needs a non-empty training matrix");
  const double mean = X_train.mean();
  const double var = (X_train.array() - mean).square().mean();
  if (!(var > 0.0)) {
    throw std::invalid_argument("gamma 'scale' is undefined: zero feature variance in dataset '" +
                                std::string(name.empty() ? "<unnamed>" : name) + "'");
  }
  return 1.0 / (static_cast<double>(X_train.cols()) * var);
}

KernelMatrix classical_kernel(const Matrix& X, const Matrix& Z, ClassicalKind kind, double gamma) {
  const auto t0 = Clock::now();
  if (X.cols() != Z.cols()) throw std::invalid_argument("classical kernel: column counts differ");
  if (!X.allFinite() || !Z.allFinite()) throw std::invalid_argument("classical kernel: non-finite features");
  Matrix K = X * Z.transpose();
  switch (kind) {
    case ClassicalKind::linear:
      break;
    case ClassicalKind::rbf_scale: {
      const Vector xn = X.rowwise().squaredNorm();
      const Vector zn = Z.rowwise().squaredNorm();
      for (Eigen::Index i = 0; i < K.rows(); ++i) {
        for (Eigen::Index j = 0; j < K.cols(); ++j) {
          const double d2 = std::max(0.0, xn(i) + zn(j) - 2.0 * K(i, j));
          K(i, j) = std::exp(-gamma * d2);
        }
      }
      break;
    }
    case ClassicalKind::poly3:
      K = (gamma * K.array()).cube().matrix();
      break;
  }
  return finish(std::move(K), Pathway::classical, {}, t0);
}

KernelMatrix classical_kernel(const Matrix& X, const Matrix& Z, ClassicalKind kind, std::string_view name) {
  const double gamma = kind == ClassicalKind::linear ? 1.0 : rbf_scale_gamma(X, name);
  return classical_kernel(X, Z, kind, gamma);
}

KernelAgreement compare_kernels(const Matrix& reference, const Matrix& other) {
  if (reference.rows() != reference.cols()) throw std::invalid_argument("compare_kernels: matrices must be square");
  if (reference.rows() != other.rows() || reference.cols() != other.cols()) {
    throw std::invalid_argument("compare_kernels: shape mismatch");
  }
  const Eigen::Index n = reference.rows();
  std::vector<double> a;
  std::vector<double> b;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      a.push_back(reference(i, j));
      b.push_back(other(i, j));
    }
  }
  if (a.size() < 2) throw std::invalid_argument("compare_kernels: need at least 2 off-diagonal entries");
  KernelAgreement out;
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  double ref_sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = b[i] - a[i];
    abs_sum += std::fabs(d);
    sq_sum += d * d;
    ref_sq += a[i] * a[i];
  }
  const auto m = static_cast<double>(a.size());
  out.mae = abs_sum / m;
  out.rmse = std::sqrt(sq_sum / m);
  out.rel_frobenius = ref_sq > 0.0 ? std::sqrt(sq_sum / ref_sq) : std::numeric_limits<double>::infinity();
  const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
  const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
  if (*amin == *amax || *bmin == *bmax) {
    // correlation undefined for a constant side; identical inputs still agree perfectly
    const double r = a == b ? 1.0 : 0.0;
    out.pearson_r = r;
    out.spearman_rho = r;
  } else {
    out.pearson_r = pearson(a, b);
    out.spearman_rho = spearman(a, b, SpearmanPMethod::t_approx).rho;
  }
  return out;
}

double min_eigenvalue(const Matrix& K) {
  if (K.rows() != K.cols()) throw std::invalid_argument("min_eigenvalue: matrix must be square");
  const Matrix S = 0.5 * (K + K.transpose());
  const Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace qkb
