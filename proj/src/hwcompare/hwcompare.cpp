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

#include "qkbench/hwcompare.hpp"

#include <spdlog/spdlog.h>

#include <map>
#include <stdexcept>

#include "qkbench/eval.hpp"
#include "qkbench/svm.hpp"

namespace qkb {

using Eigen::Index;
using Eigen::MatrixXd;

namespace {

MatrixXd slice(const MatrixXd& K, std::span<const std::size_t> r, std::span<const std::size_t> c) {
  MatrixXd out(static_cast<Index>(r.size()), static_cast<Index>(c.size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) = K(static_cast<Index>(r[i]), static_cast<Index>(c[j]));
    }
  }
  return out;
}

std::vector<int> pick(std::span<const int> y, std::span<const std::size_t> idx) {
  std::vector<int> out;
  for (std::size_t i : idx) out.push_back(y[i]);
  return out;
}

}  // namespace

SourceScore score_kernel(const MatrixXd& K, std::span<const int> y, std::string source, std::uint64_t seed,
                         int n_folds) {
  if (K.rows() != K.cols() || static_cast<std::size_t>(K.rows()) != y.size()) {
    throw std::invalid_argument("score_kernel: kernel is " + std::to_string(K.rows()) + "x" + std::to_string(K.cols()) +
                                " but there are " + std::to_string(y.size()) + " labels");
  }
  std::vector<std::size_t> rows(y.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  const auto folds = stratified_folds(y, rows, n_folds, seed);
  SourceScore s;
  s.source = std::move(source);
  std::map<double, int> picks;
  for (const Split& f : folds) {
    const MatrixXd K_tr = slice(K, f.train, f.train);
    const MatrixXd K_te = slice(K, f.test, f.train);
    const auto y_tr = pick(y, f.train);
    const auto y_te = pick(y, f.test);
    double best_ba = -1.0;
    double best_C = kDefaultCGrid.front();
    for (double C : kDefaultCGrid) {
      const SvmModel m = svm_train(K_tr, y_tr, C);
      const double ba = balanced_accuracy(y_tr, svm_predict(m, K_tr).labels);
      if (ba > best_ba) {
        best_ba = ba;
        best_C = C;
      }
    }
    ++picks[best_C];
    const SvmModel m = svm_train(K_tr, y_tr, best_C);
    s.fold_ba.push_back(balanced_accuracy(y_te, svm_predict(m, K_te).labels));
  }
  int top = 0;
  for (const auto& [C, count] : picks) {
    if (count > top) {
      top = count;
      s.best_C = C;
    }
  }
  double sum = 0.0;
  for (double v : s.fold_ba) sum += v;
  s.mean_ba = sum / static_cast<double>(s.fold_ba.size());
  return s;
}

BackendReport validate_backend(const KernelMatrix& imported, const MatrixXd& features, std::span<const int> y,
                               const FeatureMapSpec& spec, const std::optional<NoiseModel>& noise,
                               std::uint64_t seed) {
  const Index n = imported.rows();
  if (imported.cols() != n) throw std::invalid_argument("validate_backend: imported kernel must be square");
  if (features.rows() != n || static_cast<std::size_t>(n) != y.size()) {
    throw std::invalid_argument("validate_backend: imported kernel has " + std::to_string(n) + " rows but the subsample has " +
                                std::to_string(features.rows()) + " samples and " + std::to_string(y.size()) + " labels");
  }
  BackendReport r;
  r.n = static_cast<std::size_t>(n);
  r.imported_min_eigenvalue = min_eigenvalue(imported.values);
  r.imported_indefinite = imported.provenance.indefinite || r.imported_min_eigenvalue < -1e-9;
  if (r.imported_indefinite) {
    spdlog::warn("validate_backend: imported kernel is indefinite (min eigenvalue {:.3e}); kept as is",
                 r.imported_min_eigenvalue);
  }
  const MatrixXd ideal = quantum_kernel_ideal(features, spec).values;
  r.vs_ideal = compare_kernels(ideal, imported.values);
  r.scores.push_back(score_kernel(imported.values, y, "imported", seed));
  r.scores.push_back(score_kernel(ideal, y, "ideal", seed));
  if (noise) {
    const MatrixXd noisy = quantum_kernel_noisy(features, spec, *noise).values;
    r.vs_noisy = compare_kernels(noisy, imported.values);
    r.scores.push_back(score_kernel(noisy, y, "noisy", seed));
  }
  r.delta_pp = 100.0 * (r.scores[0].mean_ba - r.scores[1].mean_ba);
  return r;
}

}  // namespace qkb
