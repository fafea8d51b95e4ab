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

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

#include "qkbench/prep.hpp"
#include "qkbench/rng.hpp"

namespace qkb {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::median_impute: return "median_impute";
    case TransformKind::standard_scale: return "standard_scale";
    case TransformKind::minmax_scale: return "minmax_scale";
    case TransformKind::pca: return "pca";
    case TransformKind::nmf: return "nmf";
    case TransformKind::tree_select: return "tree_select";
  }
  return "?";
}

std::string_view to_string(Reducer r) {
  switch (r) {
    case Reducer::none: return "none";
    case Reducer::pca: return "pca";
    case Reducer::nmf: return "nmf";
    case Reducer::tree: return "tree";
  }
  return "?";
}

Reducer reducer_from_string(std::string_view name) {
  if (name == "none") return Reducer::none;
  if (name == "pca") return Reducer::pca;
  if (name == "nmf") return Reducer::nmf;
  if (name == "tree") return Reducer::tree;
  throw std::invalid_argument("unknown reducer '" + std::string(name) + "'");
}

namespace {

void require_rows(const MatrixXd& X, const char* what) {
  if (X.rows() < 2) throw std::invalid_argument(std::string(what) + ": need at least 2 training rows");
  if (!X.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite training values");
}

void require_k(int k, Index d, const char* what) {
  if (k < 1 || k > d) {
    throw std::invalid_argument(std::string(what) + ": k=" + std::to_string(k) + " outside [1, " +
                                std::to_string(d) + "]");
  }
}

constexpr double kNmfEps = 1e-12;

// Solves X ~ W H for W >= 0 with H fixed, starting from a constant W.
MatrixXd nmf_project(const MatrixXd& X, const MatrixXd& H, int max_iter, double tol) {
  const Index k = H.rows();
  const double mean = std::max(X.mean(), kNmfEps);
  MatrixXd W = MatrixXd::Constant(X.rows(), k, std::sqrt(mean / static_cast<double>(k)));
  const MatrixXd XHt = X * H.transpose();
  const MatrixXd HHt = H * H.transpose();
  double prev = (X - W * H).squaredNorm();
  for (int it = 0; it < max_iter; ++it) {
    W.array() *= XHt.array() / ((W * HHt).array() + kNmfEps);
    const double loss = (X - W * H).squaredNorm();
    if (std::fabs(prev - loss) <= tol * std::max(prev, kNmfEps)) break;
    prev = loss;
  }
  return W;
}

}  // namespace

MatrixXd FittedTransform::transform(const MatrixXd& X) const {
  if (X.cols() != k_in) {
    throw std::invalid_argument(std::string(to_string(kind)) + ": input has " + std::to_string(X.cols()) +
                                " columns, fitted on " + std::to_string(k_in));
  }
  switch (kind) {
    case TransformKind::median_impute: {
      MatrixXd out = X;
      for (std::size_t c = 0; c < columns.size(); ++c) {
        const int col = columns[c];
        for (Index i = 0; i < out.rows(); ++i) {
          if (out(i, col) == 0.0) out(i, col) = offset(static_cast<Index>(c));
        }
      }
      return out;
    }
    case TransformKind::standard_scale:
    case TransformKind::minmax_scale:
      return ((X.rowwise() - offset.transpose()).array().rowwise() / scale.transpose().array()).matrix();
    case TransformKind::pca:
      return (X.rowwise() - offset.transpose()) * components;
    case TransformKind::nmf: {
      const MatrixXd Xc = X.cwiseMax(0.0);
      return nmf_project(Xc, components, 200, 1e-6);
    }
    case TransformKind::tree_select: {
      MatrixXd out(X.rows(), static_cast<Index>(columns.size()));
      for (std::size_t c = 0; c < columns.size(); ++c) out.col(static_cast<Index>(c)) = X.col(columns[c]);
      return out;
    }
  }
  throw std::logic_error("unhandled transform kind");
}

FittedTransform fit_median_imputer(const MatrixXd& X, std::span<const int> columns) {
  require_rows(X, "median imputer");
  FittedTransform t;
  t.kind = TransformKind::median_impute;
  t.k_in = t.k_out = static_cast<int>(X.cols());
  t.columns.assign(columns.begin(), columns.end());
  t.offset.resize(static_cast<Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const int col = columns[c];
    if (col < 0 || col >= X.cols()) throw std::invalid_argument("median imputer: column out of range");
    std::vector<double> v;
    for (Index i = 0; i < X.rows(); ++i) {
      if (X(i, col) != 0.0) v.push_back(X(i, col));
    }
    double med = 0.0;
    if (!v.empty()) {
      std::sort(v.begin(), v.end());
      const std::size_t m = v.size();
      med = m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
    }
    t.offset(static_cast<Index>(c)) = med;
  }
  return t;
}

FittedTransform fit_standard_scaler(const MatrixXd& X) {
  require_rows(X, "standard scaler");
  FittedTransform t;
  t.kind = TransformKind::standard_scale;
  t.k_in = t.k_out = static_cast<int>(X.cols());
  t.offset = X.colwise().mean().transpose();
  t.scale = ((X.rowwise() - t.offset.transpose()).array().square().colwise().mean()).sqrt().transpose();
  for (Index j = 0; j < t.scale.size(); ++j) {
    if (t.scale(j) == 0.0) {
      spdlog::warn("standard scaler: column {} is constant on the training rows; scale set to 1", j);
      t.scale(j) = 1.0;
    }
  }
  return t;
}

FittedTransform fit_minmax_scaler(const MatrixXd& X) {
  require_rows(X, "min-max scaler");
  FittedTransform t;
  t.kind = TransformKind::minmax_scale;
  t.k_in = t.k_out = static_cast<int>(X.cols());
  t.offset = X.colwise().minCoeff().transpose();
  t.scale = X.colwise().maxCoeff().transpose() - t.offset;
  for (Index j = 0; j < t.scale.size(); ++j) {
    if (t.scale(j) == 0.0) t.scale(j) = 1.0;
  }
  return t;
}

FittedTransform fit_pca(const MatrixXd& X, int k) {
  require_rows(X, "pca");
  require_k(k, X.cols(), "pca");
  FittedTransform t;
  t.kind = TransformKind::pca;
  t.k_in = static_cast<int>(X.cols());
  t.k_out = k;
  t.offset = X.colwise().mean().transpose();
  const MatrixXd C = X.rowwise() - t.offset.transpose();
  const MatrixXd cov = (C.transpose() * C) / static_cast<double>(X.rows() - 1);
  const Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw std::runtime_error("pca: eigendecomposition failed");
  const Index d = X.cols();
  t.components.resize(d, k);
  t.explained_variance.resize(k);
  for (int c = 0; c < k; ++c) {
    const Index src = d - 1 - c;  // eigenvalues ascending
    VectorXd v = es.eigenvectors().col(src);
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    t.components.col(c) = v;
    t.explained_variance(c) = std::max(0.0, es.eigenvalues()(src));
  }
  return t;
}

FittedTransform fit_nmf(const MatrixXd& X, int k, const NmfOptions& opts, std::vector<double>* loss_trace) {
  require_rows(X, "nmf");
  require_k(k, X.cols(), "nmf");
  if (X.minCoeff() < 0.0) throw std::invalid_argument("nmf: input must be non-negative");
  SplitMix64 rng(opts.seed);
  MatrixXd W(X.rows(), k);
  MatrixXd H(k, X.cols());
  for (Index i = 0; i < W.size(); ++i) W.data()[i] = 0.1 + rng.uniform();
  for (Index i = 0; i < H.size(); ++i) H.data()[i] = 0.1 + rng.uniform();
  double prev = (X - W * H).squaredNorm();
  for (int it = 0; it < opts.max_iter; ++it) {
    H.array() *= (W.transpose() * X).array() / ((W.transpose() * W * H).array() + kNmfEps);
    W.array() *= (X * H.transpose()).array() / ((W * H * H.transpose()).array() + kNmfEps);
    const double loss = (X - W * H).squaredNorm();
    if (loss_trace) loss_trace->push_back(loss);
    if (std::fabs(prev - loss) <= opts.tol * std::max(prev, kNmfEps)) break;
    prev = loss;
  }
  FittedTransform t;
  t.kind = TransformKind::nmf;
  t.k_in = static_cast<int>(X.cols());
  t.k_out = k;
  t.components = H;
  return t;
}

FittedTransform fit_tree_select(const MatrixXd& X, std::span<const int> y, int k) {
  require_rows(X, "tree selection");
  require_k(k, X.cols(), "tree selection");
  FittedTransform t;
  t.kind = TransformKind::tree_select;
  t.k_in = static_cast<int>(X.cols());
  t.k_out = k;
  t.importances = gini_importances(X, y);
  std::vector<int> order(static_cast<std::size_t>(X.cols()));
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return t.importances(a) > t.importances(b); });
  t.columns.assign(order.begin(), order.begin() + k);
  std::sort(t.columns.begin(), t.columns.end());
  return t;
}

// ---------------------------------------------------------------- pipeline

MatrixXd FittedPipeline::transform(const MatrixXd& X) const {
  MatrixXd out = X;
  for (const auto& s : steps_) out = s.transform(out);
  return out;
}

int FittedPipeline::k_out() const { return steps_.empty() ? 0 : steps_.back().k_out; }

FittedPipeline fit_pipeline(const PipelineSpec& spec, const MatrixXd& X_train, std::span<const int> y_train) {
  if (static_cast<std::size_t>(X_train.rows()) != y_train.size()) {
    throw std::invalid_argument("fit_pipeline: X and y differ in length");
  }
  require_rows(X_train, "fit_pipeline");
  if (spec.reducer != Reducer::none) require_k(spec.k, X_train.cols(), "fit_pipeline");
  std::vector<FittedTransform> steps;
  MatrixXd cur = X_train;
  auto push = [&](FittedTransform t) {
    cur = t.transform(cur);
    steps.push_back(std::move(t));
  };
  if (!spec.zero_as_missing.empty()) push(fit_median_imputer(cur, spec.zero_as_missing));
  switch (spec.reducer) {
    case Reducer::none:
      push(fit_standard_scaler(cur));
      break;
    case Reducer::pca:
      push(fit_standard_scaler(cur));
      push(fit_pca(cur, spec.k));
      break;
    case Reducer::nmf:
      push(fit_minmax_scaler(cur));
      push(fit_nmf(cur, spec.k, spec.nmf));
      break;
    case Reducer::tree:
      push(fit_standard_scaler(cur));
      push(fit_tree_select(cur, y_train, spec.k));
      break;
  }
  return FittedPipeline(std::move(steps));
}

namespace {

bool bits_equal(const MatrixXd& a, const MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.size() == 0 || std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0);
}

}  // namespace

bool same_parameters(const FittedTransform& a, const FittedTransform& b) {
  return a.kind == b.kind && a.k_in == b.k_in && a.k_out == b.k_out && bits_equal(a.offset, b.offset) &&
         bits_equal(a.scale, b.scale) && bits_equal(a.components, b.components) &&
         bits_equal(a.explained_variance, b.explained_variance) && bits_equal(a.importances, b.importances) &&
         a.columns == b.columns;
}

bool same_parameters(const FittedPipeline& a, const FittedPipeline& b) {
  if (a.steps().size() != b.steps().size()) return false;
  for (std::size_t i = 0; i < a.steps().size(); ++i) {
    if (!same_parameters(a.steps()[i], b.steps()[i])) return false;
  }
  return true;
}

}  // namespace qkb
