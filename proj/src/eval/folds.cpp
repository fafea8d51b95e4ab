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
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "qkbench/eval.hpp"
#include "qkbench/rng.hpp"

namespace qkb {

namespace {

// Turns per-fold test memberships into sorted train/test splits over `rows`.
std::vector<Split> to_splits(std::span<const std::size_t> rows, std::vector<std::vector<std::size_t>> tests) {
  std::vector<Split> out(tests.size());
  for (std::size_t f = 0; f < tests.size(); ++f) {
    std::sort(tests[f].begin(), tests[f].end());
    out[f].test = tests[f];
    for (std::size_t r : rows) {
      if (!std::binary_search(tests[f].begin(), tests[f].end(), r)) out[f].train.push_back(r);
    }
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  SplitMix64 g(seed ^ (0xD1B54A32D192ED03ULL * (salt + 1)));
  return g.next();
}

// Greedy group-atomic assignment: groups (shuffled, then largest first) go to
// the fold whose class counts move least away from the per-fold targets.
std::vector<Split> grouped_folds(std::span<const int> y, std::span<const int> groups, std::span<const std::size_t> rows,
                                 int k, std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> members;
  std::vector<int> order;
  for (std::size_t r : rows) {
    auto [it, inserted] = members.try_emplace(groups[r]);
    if (inserted) order.push_back(groups[r]);
    it->second.push_back(r);
  }
  SplitMix64 rng(seed);
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return members[a].size() > members[b].size(); });

  double n_pos = 0.0;
  double n_neg = 0.0;
  for (std::size_t r : rows) (y[r] == 1 ? n_pos : n_neg) += 1.0;
  const double target_pos = n_pos / k;
  const double target_neg = n_neg / k;
  const double cap = static_cast<double>(rows.size()) / k;
  if (!order.empty() && static_cast<double>(members[order.front()].size()) > cap) {
    spdlog::warn("fold plan: group {} holds {} of {} rows, more than 1/{}; stratification is best-effort",
                 order.front(), members[order.front()].size(), rows.size(), k);
  }

  std::vector<double> pos(static_cast<std::size_t>(k), 0.0);
  std::vector<double> neg(static_cast<std::size_t>(k), 0.0);
  std::vector<std::vector<std::size_t>> tests(static_cast<std::size_t>(k));
  for (int g : order) {
    double gp = 0.0;
    double gn = 0.0;
    for (std::size_t r : members[g]) (y[r] == 1 ? gp : gn) += 1.0;
    std::size_t best = 0;
    double best_cost = 0.0;
    for (std::size_t f = 0; f < tests.size(); ++f) {
      const double dp = pos[f] + gp - target_pos;
      const double dn = neg[f] + gn - target_neg;
      const double cost = dp * dp + dn * dn - (pos[f] - target_pos) * (pos[f] - target_pos) -
                          (neg[f] - target_neg) * (neg[f] - target_neg);
      if (f == 0 || cost < best_cost) {
        best = f;
        best_cost = cost;
      }
    }
    pos[best] += gp;
    neg[best] += gn;
    tests[best].insert(tests[best].end(), members[g].begin(), members[g].end());
  }
  return to_splits(rows, std::move(tests));
}

std::vector<Split> partition(std::span<const int> y, const std::optional<std::vector<int>>& groups,
                             std::span<const std::size_t> rows, int k, std::uint64_t seed) {
  if (groups) {
    std::set<int> seen;
    bool all_unique = true;
    for (std::size_t r : rows) all_unique = seen.insert((*groups)[r]).second && all_unique;
    if (!all_unique) return grouped_folds(y, *groups, rows, k, seed);
  }
  return stratified_folds(y, rows, k, seed);
}

}  // namespace

std::vector<Split> stratified_folds(std::span<const int> y, std::span<const std::size_t> rows, int k,
                                    std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_folds: need at least 2 folds");
  std::vector<std::size_t> neg;
  std::vector<std::size_t> pos;
  for (std::size_t r : rows) (y[r] == 1 ? pos : neg).push_back(r);
  SplitMix64 rng(seed);
  rng.shuffle(neg);
  rng.shuffle(pos);
  std::vector<std::vector<std::size_t>> tests(static_cast<std::size_t>(k));
  // dealing continues across classes so fold sizes also stay within one
  std::size_t slot = 0;
  for (const auto* cls : {&neg, &pos}) {
    for (std::size_t r : *cls) tests[slot++ % tests.size()].push_back(r);
  }
  return to_splits(rows, std::move(tests));
}

FoldPlan make_fold_plan(std::span<const int> y, const std::optional<std::vector<int>>& groups, int n_outer,
                        int n_inner, std::uint64_t seed) {
  if (n_outer < 2 || n_inner < 2) throw std::invalid_argument("make_fold_plan: need at least 2 outer and 2 inner folds");
  if (groups && groups->size() != y.size()) throw std::invalid_argument("make_fold_plan: groups and labels differ in length");
  const auto n_pos = static_cast<int>(std::count(y.begin(), y.end(), 1));
  const auto n_neg = static_cast<int>(y.size()) - n_pos;
  if (std::min(n_pos, n_neg) < n_outer) {
    throw std::invalid_argument("make_fold_plan: smallest class has " + std::to_string(std::min(n_pos, n_neg)) +
                                " members, fewer than " + std::to_string(n_outer) + " outer folds");
  }
  std::vector<std::size_t> rows(y.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  FoldPlan plan;
  plan.seed = seed;
  plan.n_outer = n_outer;
  plan.n_inner = n_inner;
  plan.outer = partition(y, groups, rows, n_outer, seed);
  for (std::size_t f = 0; f < plan.outer.size(); ++f) {
    plan.inner.push_back(partition(y, groups, plan.outer[f].train, n_inner, derive_seed(seed, f)));
  }
  return plan;
}

}  // namespace qkb
