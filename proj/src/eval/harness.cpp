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
#include <chrono>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>

#include "qkbench/eval.hpp"
#include "qkbench/rng.hpp"

namespace qkb {

using Eigen::Index;
using Eigen::MatrixXd;
using nlohmann::json;

std::string version_string() { return "qkbench 0.1.0"; }

std::string KernelConfig::label() const {
  if (family == KernelFamily::classical) return std::string(to_string(classical));
  std::string s(to_string(map));
  if (noisy) s += "/noisy";
  if (qkt) s += "/qkt";
  return s;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

MatrixXd rows_of(const MatrixXd& X, std::span<const std::size_t> rows) {
  MatrixXd out(static_cast<Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = X.row(static_cast<Index>(rows[i]));
  return out;
}

MatrixXd slice(const MatrixXd& K, std::span<const std::size_t> r, std::span<const std::size_t> c) {
  MatrixXd out(static_cast<Index>(r.size()), static_cast<Index>(c.size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) = K(static_cast<Index>(r[i]), static_cast<Index>(c[j]));
    }
  }
  return out;
}

template <typename T>
std::vector<T> pick(std::span<const T> v, std::span<const std::size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(v[i]);
  return out;
}

// Positions of `sub` (ascending dataset rows) inside `rows` (ascending).
std::vector<std::size_t> positions(std::span<const std::size_t> rows, std::span<const std::size_t> sub) {
  std::vector<std::size_t> out;
  out.reserve(sub.size());
  for (std::size_t r : sub) {
    const auto it = std::lower_bound(rows.begin(), rows.end(), r);
    if (it == rows.end() || *it != r) throw std::logic_error("fold row not contained in its parent split");
    out.push_back(static_cast<std::size_t>(it - rows.begin()));
  }
  return out;
}

bool both_classes(std::span<const int> y) {
  bool pos = false;
  bool neg = false;
  for (int v : y) (v == 1 ? pos : neg) = true;
  return pos && neg;
}

Hash128 matrix_hash(const MatrixXd& M) {
  std::string bytes(reinterpret_cast<const char*>(M.data()), sizeof(double) * static_cast<std::size_t>(M.size()));
  bytes += std::to_string(M.rows()) + "x" + std::to_string(M.cols());
  return content_hash(bytes);
}

json kernel_json(const KernelConfig& cfg) {
  json j;
  j["family"] = cfg.family == KernelFamily::quantum ? "quantum" : "classical";
  if (cfg.family == KernelFamily::quantum) {
    j["map"] = std::string(to_string(cfg.map));
    j["reps"] = cfg.reps;
    j["noisy"] = cfg.noisy;
    if (cfg.noisy) j["noise"] = {cfg.noise.p1q, cfg.noise.p2q};
    j["qkt"] = cfg.qkt;
    if (cfg.qkt) {
      j["qkt_options"] = {cfg.qkt_options.max_iter, cfg.qkt_options.fd_step, cfg.qkt_options.gtol,
                          cfg.qkt_options.memory};
    }
  } else {
    j["classical"] = std::string(to_string(cfg.classical));
  }
  return j;
}

KernelMatrix compute_pair(const KernelConfig& cfg, const FeatureMapSpec& spec, const MatrixXd& A, const MatrixXd* B,
                          double gamma) {
  if (cfg.family == KernelFamily::classical) {
    return B ? classical_kernel(*B, A, cfg.classical, gamma) : classical_kernel(A, A, cfg.classical, gamma);
  }
  if (cfg.noisy) return B ? quantum_kernel_noisy(*B, A, spec, cfg.noise) : quantum_kernel_noisy(A, spec, cfg.noise);
  return B ? quantum_kernel_ideal(*B, A, spec) : quantum_kernel_ideal(A, spec);
}

}  // namespace

FoldKernels compute_fold_kernels(const KernelConfig& cfg, const MatrixXd& F_train, const MatrixXd& F_test,
                                 std::span<const int> y_train, std::string_view dataset_name,
                                 const KernelCache* cache) {
  const auto t0 = Clock::now();
  FoldKernels out;
  FeatureMapSpec spec{cfg.map, static_cast<int>(F_train.cols()), cfg.reps, std::nullopt};
  double gamma = 0.0;
  if (cfg.family == KernelFamily::quantum) {
    if (cfg.qkt && cfg.noisy) throw std::invalid_argument("kernel training runs on the ideal pathway only");
    spec.validate();
    if (cfg.qkt) {
      out.qkt = optimize_theta(F_train, y_train, spec, cfg.qkt_options);
      spec.theta = out.qkt->theta_star;
    }
  } else if (cfg.classical != ClassicalKind::linear) {
    gamma = rbf_scale_gamma(F_train, dataset_name);
  }

  // Keys cover the transformed features, so they stay valid across configs
  // that share preprocessing. Trained maps are keyed by their theta.
  std::optional<Hash128> key_train;
  std::optional<Hash128> key_test;
  if (cache) {
    json base = kernel_json(cfg);
    if (spec.theta) base["theta"] = *spec.theta;
    base["train"] = matrix_hash(F_train).hex();
    base["role"] = "train";
    key_train = content_hash(base.dump());
    base["test"] = matrix_hash(F_test).hex();
    base["role"] = "test";
    key_test = content_hash(base.dump());
  }
  auto fetch = [&](const std::optional<Hash128>& key, const MatrixXd* B) {
    if (key) {
      if (auto hit = cache->get(*key)) return hit->values;
    }
    KernelMatrix K = compute_pair(cfg, spec, F_train, B, gamma);
    if (key) {
      K.provenance.config_hash = *key;
      cache->put(*key, K);
    }
    return K.values;
  };
  out.train = fetch(key_train, nullptr);
  out.test = F_test.rows() > 0 ? fetch(key_test, &F_test) : MatrixXd(0, F_train.rows());
  out.indefinite = out.train.rows() > 0 && min_eigenvalue(out.train) < -1e-9;
  out.wall_time_s = seconds_since(t0);
  return out;
}

std::size_t select_C(std::span<const double> mean_ba, std::span<const int> valid) {
  if (mean_ba.empty()) throw std::invalid_argument("select_C: empty grid");
  std::optional<std::size_t> best;
  for (std::size_t c = 0; c < mean_ba.size(); ++c) {
    if (valid[c] == 0) continue;
    if (!best || mean_ba[c] > mean_ba[*best] || (mean_ba[c] == mean_ba[*best] && valid[c] > valid[*best])) best = c;
  }
  if (!best) {
    spdlog::warn("inner CV: every (C, fold) pair was degenerate; using the first grid value");
    return 0;
  }
  return *best;
}

void inner_grid_search(const MatrixXd& K_train, std::span<const int> y_train, std::span<const std::size_t> outer_train,
                       std::span<const Split> inner, std::span<const double> C_grid, std::vector<double>& mean_ba,
                       std::vector<int>& valid) {
  mean_ba.assign(C_grid.size(), 0.0);
  valid.assign(C_grid.size(), 0);
  for (const Split& s : inner) {
    const auto tr = positions(outer_train, s.train);
    const auto va = positions(outer_train, s.test);
    const auto y_tr = pick(y_train, tr);
    const auto y_va = pick(y_train, va);
    if (!both_classes(y_tr) || !both_classes(y_va)) continue;
    const MatrixXd K_tr = slice(K_train, tr, tr);
    const MatrixXd K_va = slice(K_train, va, tr);
    for (std::size_t c = 0; c < C_grid.size(); ++c) {
      const SvmModel m = svm_train(K_tr, y_tr, C_grid[c]);
      const Prediction p = svm_predict(m, K_va);
      mean_ba[c] += balanced_accuracy(y_va, p.labels);
      ++valid[c];
    }
  }
  for (std::size_t c = 0; c < C_grid.size(); ++c) {
    mean_ba[c] = valid[c] > 0 ? mean_ba[c] / valid[c] : std::numeric_limits<double>::quiet_NaN();
  }
}

namespace {

struct FoldRun {
  FoldResult result;
  FoldKernels kernels;
  std::vector<int> y_train;
  std::vector<int> y_test;
};

FoldRun run_fold(const Dataset& data, const PipelineSpec& pipeline, const KernelConfig& kernel, const FoldPlan& plan,
                 std::size_t f, const NestedCvOptions& opts) {
  const Split& split = plan.outer[f];
  FoldRun run;
  run.y_train = pick<int>(data.y, split.train);
  run.y_test = pick<int>(data.y, split.test);
  const MatrixXd X_tr = rows_of(data.X, split.train);
  const MatrixXd X_te = rows_of(data.X, split.test);

  PipelineSpec ps = pipeline;
  if (ps.zero_as_missing.empty()) ps.zero_as_missing = data.zero_as_missing;
  const FittedPipeline fitted = fit_pipeline(ps, X_tr, run.y_train);
  const MatrixXd F_tr = fitted.transform(X_tr);
  const MatrixXd F_te = fitted.transform(X_te);

  run.kernels = compute_fold_kernels(kernel, F_tr, F_te, run.y_train, data.name, opts.cache);
  FoldResult& r = run.result;
  r.kernel_time_s = run.kernels.wall_time_s;
  r.indefinite = run.kernels.indefinite;
  r.k_features = static_cast<int>(F_tr.cols());
  r.n_train = split.train.size();
  r.n_test = split.test.size();
  if (run.kernels.qkt) {
    r.theta = run.kernels.qkt->theta_star;
    r.kta_initial = run.kernels.qkt->kta_initial;
    r.kta_final = run.kernels.qkt->kta_final;
  }

  if (opts.spectra) r.spectrum = spectral_profile(run.kernels.train);

  const auto t0 = Clock::now();
  inner_grid_search(run.kernels.train, run.y_train, split.train, plan.inner[f], opts.C_grid, r.inner_mean_ba,
                    r.inner_valid);
  r.chosen_C = opts.C_grid[select_C(r.inner_mean_ba, r.inner_valid)];
  const SvmModel model = svm_train(run.kernels.train, run.y_train, r.chosen_C);
  r.svm_converged = model.converged;
  const Prediction p = svm_predict(model, run.kernels.test);
  r.metrics = compute_metrics(run.y_test, p.labels, p.decision_values);
  r.fit_time_s = seconds_since(t0);
  return run;
}

std::string default_config_hash(const Dataset& data, const PipelineSpec& pipeline, const KernelConfig& kernel,
                                const FoldPlan& plan, std::span<const double> C_grid) {
  json j;
  j["dataset"] = data.name;
  j["rows"] = data.size();
  j["data"] = matrix_hash(data.X).hex();
  j["reducer"] = std::string(to_string(pipeline.reducer));
  j["k"] = pipeline.k;
  j["kernel"] = kernel_json(kernel);
  j["plan"] = {plan.seed, plan.n_outer, plan.n_inner};
  j["C"] = std::vector<double>(C_grid.begin(), C_grid.end());
  return content_hash(j.dump()).hex();
}

}  // namespace

ResultRecord nested_cv(const Dataset& data, const PipelineSpec& pipeline, const KernelConfig& kernel,
                       const FoldPlan& plan, const NestedCvOptions& opts) {
  if (plan.outer.size() != plan.inner.size()) throw std::invalid_argument("nested_cv: malformed fold plan");
  if (opts.C_grid.empty()) throw std::invalid_argument("nested_cv: empty C grid");
  ResultRecord rec;
  rec.config_hash =
      opts.config_hash.empty() ? default_config_hash(data, pipeline, kernel, plan, opts.C_grid) : opts.config_hash;
  rec.dataset = data.name;
  rec.kernel = kernel.label();
  rec.reducer = std::string(to_string(pipeline.reducer));
  rec.k = pipeline.k;
  rec.seed = plan.seed;
  rec.version = version_string();
  rec.timestamp = utc_timestamp();
  for (std::size_t f = 0; f < plan.outer.size(); ++f) {
    FoldRun run = run_fold(data, pipeline, kernel, plan, f, opts);
    rec.fold_ba.push_back(run.result.metrics.balanced_accuracy);
    rec.folds.push_back(std::move(run.result));
  }
  double s = 0.0;
  for (double v : rec.fold_ba) s += v;
  rec.mean_ba = s / static_cast<double>(rec.fold_ba.size());
  return rec;
}

std::vector<std::size_t> nested_fraction_subsample(std::span<const int> y, std::span<const std::size_t> rows,
                                                   double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("fraction must lie in (0, 1]");
  std::vector<std::size_t> neg;
  std::vector<std::size_t> pos;
  for (std::size_t r : rows) (y[r] == 1 ? pos : neg).push_back(r);
  SplitMix64 rng(seed);
  rng.shuffle(neg);
  rng.shuffle(pos);
  std::vector<std::size_t> out;
  for (const auto* cls : {&neg, &pos}) {
    const auto take = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(cls->size()) - 1e-9));
    out.insert(out.end(), cls->begin(), cls->begin() + static_cast<std::ptrdiff_t>(std::min(take, cls->size())));
  }
  std::sort(out.begin(), out.end());
  return out;
}

LearningCurve learning_curve(const Dataset& data, const PipelineSpec& pipeline, const KernelConfig& kernel,
                             const FoldPlan& plan, std::span<const double> fractions, const NestedCvOptions& opts) {
  LearningCurve lc;
  for (double fr : fractions) {
    LearningPoint p;
    p.fraction = fr;
    lc.points.push_back(p);
  }
  std::vector<std::vector<double>> n_train(fractions.size());
  for (std::size_t f = 0; f < plan.outer.size(); ++f) {
    const FoldRun run = run_fold(data, pipeline, kernel, plan, f, opts);
    const Split& split = plan.outer[f];
    for (std::size_t i = 0; i < fractions.size(); ++i) {
      const auto sub = nested_fraction_subsample(data.y, split.train, fractions[i], plan.seed + 7919 * (f + 1));
      const auto pos_idx = positions(split.train, sub);
      const auto y_sub = pick<int>(run.y_train, pos_idx);
      const auto n_pos = std::count(y_sub.begin(), y_sub.end(), 1);
      const auto n_neg = static_cast<std::ptrdiff_t>(y_sub.size()) - n_pos;
      if (n_pos < 2 || n_neg < 2) {
        lc.points[i].fold_ba.push_back(std::nullopt);
        continue;
      }
      const MatrixXd K_sub = slice(run.kernels.train, pos_idx, pos_idx);
      std::vector<std::size_t> all_test(static_cast<std::size_t>(run.kernels.test.rows()));
      for (std::size_t t = 0; t < all_test.size(); ++t) all_test[t] = t;
      const MatrixXd K_te = slice(run.kernels.test, all_test, pos_idx);
      const SvmModel m = svm_train(K_sub, y_sub, run.result.chosen_C);
      const Prediction pr = svm_predict(m, K_te);
      lc.points[i].fold_ba.push_back(balanced_accuracy(run.y_test, pr.labels));
      n_train[i].push_back(static_cast<double>(sub.size()));
    }
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    double s = 0.0;
    int c = 0;
    for (const auto& v : lc.points[i].fold_ba) {
      if (v) {
        s += *v;
        ++c;
      }
    }
    if (c == 0) continue;
    lc.points[i].mean_ba = s / c;
    double nt = 0.0;
    for (double v : n_train[i]) nt += v;
    lc.points[i].mean_n_train = nt / static_cast<double>(n_train[i].size());
    xs.push_back(std::log(lc.points[i].mean_n_train));
    ys.push_back(*lc.points[i].mean_ba);
  }
  if (xs.size() >= 3) lc.slope = ols_slope(xs, ys);
  return lc;
}

SeedSweep seed_sweep_on_kernel(const MatrixXd& K, std::span<const int> y, const std::optional<std::vector<int>>& groups,
                               std::span<const std::uint64_t> seeds, int n_outer, int n_inner,
                               std::span<const double> C_grid) {
  if (seeds.size() < 2) throw std::invalid_argument("seed_sweep: need at least 2 seeds for a coefficient of variation");
  SeedSweep out;
  out.seeds.assign(seeds.begin(), seeds.end());
  for (std::uint64_t seed : seeds) {
    const FoldPlan plan = make_fold_plan(y, groups, n_outer, n_inner, seed);
    double s = 0.0;
    for (std::size_t f = 0; f < plan.outer.size(); ++f) {
      const Split& split = plan.outer[f];
      const MatrixXd K_tr = slice(K, split.train, split.train);
      const MatrixXd K_te = slice(K, split.test, split.train);
      const auto y_tr = pick(y, split.train);
      const auto y_te = pick(y, split.test);
      std::vector<double> mean_ba;
      std::vector<int> valid;
      inner_grid_search(K_tr, y_tr, split.train, plan.inner[f], C_grid, mean_ba, valid);
      const SvmModel m = svm_train(K_tr, y_tr, C_grid[select_C(mean_ba, valid)]);
      s += balanced_accuracy(y_te, svm_predict(m, K_te).labels);
    }
    out.mean_ba.push_back(s / static_cast<double>(plan.outer.size()));
  }
  out.cov = cov(out.mean_ba);
  return out;
}

SeedSweep seed_sweep(const Dataset& data, const PipelineSpec& pipeline, const KernelConfig& kernel,
                     std::span<const std::uint64_t> seeds, int n_outer, int n_inner, std::span<const double> C_grid) {
  PipelineSpec ps = pipeline;
  if (ps.zero_as_missing.empty()) ps.zero_as_missing = data.zero_as_missing;
  const FittedPipeline fitted = fit_pipeline(ps, data.X, data.y);
  const MatrixXd F = fitted.transform(data.X);
  const FoldKernels fk = compute_fold_kernels(kernel, F, MatrixXd(0, F.cols()), data.y, data.name);
  return seed_sweep_on_kernel(fk.train, data.y, data.groups, seeds, n_outer, n_inner, C_grid);
}

SeedComparison compare_seed_sweeps(const SeedSweep& a, const SeedSweep& b) {
  if (a.mean_ba.size() != b.mean_ba.size()) throw std::invalid_argument("compare_seed_sweeps: seed counts differ");
  SeedComparison c;
  for (std::size_t i = 0; i < a.mean_ba.size(); ++i) {
    if (a.mean_ba[i] > b.mean_ba[i]) ++c.wins_a;
    if (b.mean_ba[i] > a.mean_ba[i]) ++c.wins_b;
  }
  c.wilcoxon = wilcoxon_signed_rank(a.mean_ba, b.mean_ba);
  return c;
}

}  // namespace qkb
