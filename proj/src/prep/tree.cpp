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
#include <map>
#include <stdexcept>
#include <vector>

#include "qkbench/prep.hpp"

namespace qkb {

namespace {

using Eigen::Index;

struct Counts {
  std::map<int, double> by_label;
  double total = 0.0;

  void add(int label, double w) {
    by_label[label] += w;
    total += w;
  }
  [[nodiscard]] double gini() const {
    if (total <= 0.0) return 0.0;
    double s = 0.0;
    for (const auto& [label, c] : by_label) s += (c / total) * (c / total);
    return 1.0 - s;
  }
};

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double decrease = -1.0;
};

class CartBuilder {
 public:
  CartBuilder(const Eigen::MatrixXd& X, std::span<const int> y) : X_(X), y_(y), imp_(Eigen::VectorXd::Zero(X.cols())) {}

  void grow(std::vector<Index> rows) {
    // explicit stack keeps deep trees off the call stack
    std::vector<std::vector<Index>> stack;
    stack.push_back(std::move(rows));
    while (!stack.empty()) {
      std::vector<Index> node = std::move(stack.back());
      stack.pop_back();
      if (node.size() < 2) continue;
      Counts all;
      for (Index r : node) all.add(y_[static_cast<std::size_t>(r)], 1.0);
      const double g = all.gini();
      if (g == 0.0) continue;
      const Split s = best_split(node, all, g);
      if (s.feature < 0) continue;
      imp_(s.feature) += s.decrease;
      std::vector<Index> left;
      std::vector<Index> right;
      for (Index r : node) (X_(r, s.feature) <= s.threshold ? left : right).push_back(r);
      stack.push_back(std::move(right));
      stack.push_back(std::move(left));
    }
  }

  [[nodiscard]] const Eigen::VectorXd& importances() const { return imp_; }

 private:
  // Weighted impurity decrease N_t*g_t - N_l*g_l - N_r*g_r; strict '>' keeps
  // the lowest feature and lowest threshold among equal candidates.
  Split best_split(const std::vector<Index>& node, const Counts& all, double g) const {
    Split best;
    std::vector<Index> order = node;
    for (Index f = 0; f < X_.cols(); ++f) {
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return X_(a, f) < X_(b, f); });
      Counts left;
      Counts right = all;
      for (std::size_t t = 0; t + 1 < order.size(); ++t) {
        const int label = y_[static_cast<std::size_t>(order[t])];
        left.add(label, 1.0);
        right.add(label, -1.0);
        const double v0 = X_(order[t], f);
        const double v1 = X_(order[t + 1], f);
        if (!(v0 < v1)) continue;
        const double dec = all.total * g - left.total * left.gini() - right.total * right.gini();
        if (dec > best.decrease) {
          best.feature = static_cast<int>(f);
          best.threshold = v0 + 0.5 * (v1 - v0);
          best.decrease = dec;
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& X_;
  std::span<const int> y_;
  Eigen::VectorXd imp_;
};

}  // namespace

Eigen::VectorXd gini_importances(const Eigen::MatrixXd& X, std::span<const int> y) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw std::invalid_argument("gini_importances: X and y differ in length");
  CartBuilder b(X, y);
  std::vector<Index> rows(static_cast<std::size_t>(X.rows()));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<Index>(i);
  b.grow(std::move(rows));
  Eigen::VectorXd imp = b.importances().cwiseMax(0.0);
  const double total = imp.sum();
  if (total > 0.0) imp /= total;
  return imp;
}

}  // namespace qkb
