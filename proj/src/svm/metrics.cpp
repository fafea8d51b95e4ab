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
#include "qkbench/svm.hpp"

namespace qkb {

namespace {

struct Confusion {
  double tp = 0, fn = 0, tn = 0, fp = 0;
};

Confusion confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("metrics: label arrays differ in length");
  if (y_true.empty()) throw std::invalid_argument("metrics: empty input");
  Confusion c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool t = y_true[i] == 1;
    const bool p = y_pred[i] == 1;
    if (t && p) ++c.tp;
    if (t && !p) ++c.fn;
    if (!t && !p) ++c.tn;
    if (!t && p) ++c.fp;
  }
  return c;
}

double ba_from(const Confusion& c) {
  // a class absent from y_true contributes no recall term
  double acc = 0.0;
  int terms = 0;
  if (c.tp + c.fn > 0) {
    acc += c.tp / (c.tp + c.fn);
    ++terms;
  }
  if (c.tn + c.fp > 0) {
    acc += c.tn / (c.tn + c.fp);
    ++terms;
  }
  return acc / terms;
}

}  // namespace

double balanced_accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
  return ba_from(confusion(y_true, y_pred));
}

MetricBundle compute_metrics(std::span<const int> y_true, std::span<const int> y_pred, std::span<const double> scores) {
  const Confusion c = confusion(y_true, y_pred);
  if (scores.size() != y_true.size()) throw std::invalid_argument("metrics: score array differs in length");
  MetricBundle m;
  m.balanced_accuracy = ba_from(c);
  const double f1_den = 2 * c.tp + c.fp + c.fn;
  m.f1 = f1_den > 0 ? 2 * c.tp / f1_den : 0.0;
  const double mcc_den = std::sqrt((c.tp + c.fp) * (c.tp + c.fn) * (c.tn + c.fp) * (c.tn + c.fn));
  m.mcc = mcc_den > 0 ? (c.tp * c.tn - c.fp * c.fn) / mcc_den : 0.0;

  const double n_pos = c.tp + c.fn;
  const double n_neg = c.tn + c.fp;
  if (n_pos > 0 && n_neg > 0) {
    const auto r = average_ranks(scores);
    double pos_rank_sum = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      if (y_true[i] == 1) pos_rank_sum += r[i];
    }
    m.roc_auc = (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg);
  }
  if (n_pos > 0) {
    // average precision: step integration over distinct score thresholds
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double tp = 0.0;
    double seen = 0.0;
    double prev_recall = 0.0;
    double ap = 0.0;
    std::size_t k = 0;
    while (k < order.size()) {
      const double s = scores[order[k]];
      while (k < order.size() && scores[order[k]] == s) {
        if (y_true[order[k]] == 1) ++tp;
        ++seen;
        ++k;
      }
      const double recall = tp / n_pos;
      ap += (recall - prev_recall) * (tp / seen);
      prev_recall = recall;
    }
    m.pr_auc = ap;
  }
  return m;
}

}  // namespace qkb
