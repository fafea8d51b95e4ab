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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qkb {

/// Gate alphabet. RX/RY/RZ/H/CX form the abstract set used by the feature
/// maps; RZ/SX/X/CX is the native set produced by decompose_native().
enum class GateKind { RX, RY, RZ, SX, X, H, CX };

std::string_view to_string(GateKind kind);

bool is_rotation(GateKind kind);

struct Gate {
  GateKind kind = GateKind::X;
  std::array<int, 2> qubits{0, -1};  // qubits[1] < 0 for single-qubit gates
  double angle = 0.0;                // radians, meaningful for RX/RY/RZ only

  [[nodiscard]] int arity() const { return qubits[1] < 0 ? 1 : 2; }

  static Gate rx(int q, double theta) { return {GateKind::RX, {q, -1}, theta}; }
  static Gate ry(int q, double theta) { return {GateKind::RY, {q, -1}, theta}; }
  static Gate rz(int q, double phi) { return {GateKind::RZ, {q, -1}, phi}; }
  static Gate sx(int q) { return {GateKind::SX, {q, -1}, 0.0}; }
  static Gate x(int q) { return {GateKind::X, {q, -1}, 0.0}; }
  static Gate h(int q) { return {GateKind::H, {q, -1}, 0.0}; }
  static Gate cx(int control, int target) { return {GateKind::CX, {control, target}, 0.0}; }

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Ordered gate list on a fixed-width register. Little-endian qubit order:
/// qubit 0 is the least significant bit of a basis index.
class Circuit {
 public:
  explicit Circuit(int n_qubits);

  /// Appends after validating qubit indices and angle.
  /// Throws std::invalid_argument on an out-of-range or repeated qubit.
  void add(const Gate& gate);
  void append(const Circuit& other);

  [[nodiscard]] int n_qubits() const { return n_qubits_; }
  [[nodiscard]] const std::vector<Gate>& gates() const { return gates_; }
  [[nodiscard]] std::size_t size() const { return gates_.size(); }
  [[nodiscard]] bool empty() const { return gates_.empty(); }

  auto begin() const { return gates_.begin(); }
  auto end() const { return gates_.end(); }

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  int n_qubits_;
  std::vector<Gate> gates_;
};

enum class FeatureMapKind { rot2dof, belis, sakhnenko10, zzfm };

std::string_view to_string(FeatureMapKind kind);
FeatureMapKind feature_map_from_string(std::string_view name);

inline constexpr double kThetaLower = 0.01;
inline constexpr double kThetaUpper = 5.0;

struct FeatureMapSpec {
  FeatureMapKind kind = FeatureMapKind::rot2dof;
  int k = 1;
  int reps = 2;
  std::optional<std::vector<double>> theta;  // per-feature scaling in [0.01, 5]

  /// Throws std::invalid_argument when k < 1, reps < 1, or theta is malformed.
  void validate() const;

  /// ceil(k/2) for the double-feature maps, k for zzfm.
  [[nodiscard]] int n_qubits() const;

  friend bool operator==(const FeatureMapSpec&, const FeatureMapSpec&) = default;
};

struct CircuitMetrics {
  int depth = 0;
  int two_qubit_count = 0;
  int gate_count = 0;
  /// Parameterised rotation gates (RX/RY/RZ) in the measured circuit.
  int gate_slot_count = 0;
  int n_qubits = 0;
};

/// Builds U(x) for one sample in the abstract gate set. When spec.theta is
/// set the encoded vector is theta ⊙ x.
Circuit build_feature_map(const FeatureMapSpec& spec, std::span<const double> x);

/// Rewrites RX/RY as RZ-SX-RZ-SX-RZ and H as RZ-SX-RZ; the result equals the
/// input up to a global phase. No RZ merging is performed.
Circuit decompose_native(const Circuit& c);

/// ASAP layering over qubit dependencies; every gate occupies one layer.
CircuitMetrics circuit_metrics(const Circuit& c);

/// Reverse order with inverted gates. SX^dagger is emitted as RZ(pi) SX RZ(pi),
/// which is exact up to global phase.
Circuit adjoint(const Circuit& c);

}  // namespace qkb
