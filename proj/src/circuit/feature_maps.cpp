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

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkbench/circuit.hpp"

namespace qkb {

std::string_view to_string(FeatureMapKind kind) {
  switch (kind) {
    case FeatureMapKind::rot2dof: return "rot2dof";
    case FeatureMapKind::belis: return "belis";
    case FeatureMapKind::sakhnenko10: return "sakhnenko10";
    case FeatureMapKind::zzfm: return "zzfm";
  }
  return "?";
}

FeatureMapKind feature_map_from_string(std::string_view name) {
  if (name == "rot2dof") return FeatureMapKind::rot2dof;
  if (name == "belis") return FeatureMapKind::belis;
  if (name == "sakhnenko10") return FeatureMapKind::sakhnenko10;
  if (name == "zzfm") return FeatureMapKind::zzfm;
  throw std::invalid_argument("unknown feature map '" + std::string(name) + "'");
}

void FeatureMapSpec::validate() const {
  if (k < 1) throw std::invalid_argument("feature map needs k >= 1, got " + std::to_string(k));
  if (reps < 1) throw std::invalid_argument("feature map needs reps >= 1, got " + std::to_string(reps));
  if (theta) {
    if (static_cast<int>(theta->size()) != k) {
      throw std::invalid_argument("theta has length " + std::to_string(theta->size()) + ", expected " +
                                  std::to_string(k));
    }
    for (double t : *theta) {
      if (!(t >= kThetaLower && t <= kThetaUpper)) {
        throw std::invalid_argument("theta component " + std::to_string(t) + " outside [0.01, 5]");
      }
    }
  }
}

int FeatureMapSpec::n_qubits() const {
  return kind == FeatureMapKind::zzfm ? k : (k + 1) / 2;
}

namespace {

// S_x block: RX(x_2q) RZ(x_2q+1) per qubit. `swapped` gives S'_x.
void encode_pairs(Circuit& c, const std::vector<double>& f, bool swapped) {
  for (int q = 0; q < c.n_qubits(); ++q) {
    const double a = f[2 * q];
    const double b = f[2 * q + 1];
    if (!swapped) {
      c.add(Gate::rx(q, a));
      c.add(Gate::rz(q, b));
    } else {
      c.add(Gate::rz(q, a));
      c.add(Gate::rx(q, b));
    }
  }
}

}  // namespace

Circuit build_feature_map(const FeatureMapSpec& spec, std::span<const double> x) {
  spec.validate();
  if (static_cast<int>(x.size()) != spec.k) {
    throw std::invalid_argument("feature vector has length " + std::to_string(x.size()) + ", map expects k=" +
                                std::to_string(spec.k));
  }
  std::vector<double> f(x.begin(), x.end());
  if (spec.theta) {
    for (std::size_t j = 0; j < f.size(); ++j) f[j] *= (*spec.theta)[j];
  }
  const int n = spec.n_qubits();
  if (spec.kind != FeatureMapKind::zzfm && f.size() % 2 == 1) f.push_back(0.0);

  Circuit c(n);
  using std::numbers::pi;
  for (int r = 0; r < spec.reps; ++r) {
    switch (spec.kind) {
      case FeatureMapKind::rot2dof:
        encode_pairs(c, f, false);
        break;
      case FeatureMapKind::belis:
        encode_pairs(c, f, false);
        for (int q = 0; q + 1 < n; ++q) c.add(Gate::cx(q, q + 1));
        encode_pairs(c, f, true);
        break;
      case FeatureMapKind::sakhnenko10:
        for (int q = 0; q < n; ++q) {
          c.add(Gate::rx(q, f[2 * q]));
          c.add(Gate::ry(q, pi / 2));
          c.add(Gate::rx(q, pi / 2));
          c.add(Gate::rx(q, f[2 * q + 1]));
        }
        if (n >= 2) {
          for (int q = 0; q < n; ++q) c.add(Gate::cx(q, (q + 1) % n));
        }
        break;
      case FeatureMapKind::zzfm:
        for (int q = 0; q < n; ++q) c.add(Gate::h(q));
        for (int i = 0; i < n; ++i) {
          for (int j = i + 1; j < n; ++j) {
            c.add(Gate::cx(i, j));
            c.add(Gate::rz(j, 2.0 * f[i] * f[j]));
            c.add(Gate::cx(i, j));
          }
        }
        break;
    }
  }
  return c;
}

}  // namespace qkb
