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

#include "qkbench/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qkb {

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::RX: return "rx";
    case GateKind::RY: return "ry";
    case GateKind::RZ: return "rz";
    case GateKind::SX: return "sx";
    case GateKind::X: return "x";
    case GateKind::H: return "h";
    case GateKind::CX: return "cx";
  }
  return "?";
}

bool is_rotation(GateKind kind) {
  return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ;
}

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1) {
    throw std::invalid_argument("circuit width must be positive, got " + std::to_string(n_qubits));
  }
}

void Circuit::add(const Gate& gate) {
  const bool two = gate.kind == GateKind::CX;
  if (two != (gate.arity() == 2)) {
    throw std::invalid_argument("gate " + std::string(to_string(gate.kind)) + " has wrong arity");
  }
  for (int i = 0; i < gate.arity(); ++i) {
    const int q = gate.qubits[i];
    if (q < 0 || q >= n_qubits_) {
      throw std::invalid_argument("qubit index " + std::to_string(q) + " outside register of width " +
                                  std::to_string(n_qubits_));
    }
  }
  if (two && gate.qubits[0] == gate.qubits[1]) {
    throw std::invalid_argument("two-qubit gate acts twice on qubit " + std::to_string(gate.qubits[0]));
  }
  if (!std::isfinite(gate.angle)) {
    throw std::invalid_argument("non-finite rotation angle");
  }
  gates_.push_back(gate);
}

void Circuit::append(const Circuit& other) {
  if (other.n_qubits_ > n_qubits_) {
    throw std::invalid_argument("appended circuit is wider than the target");
  }
  for (const auto& g : other.gates_) add(g);
}

Circuit decompose_native(const Circuit& c) {
  using std::numbers::pi;
  Circuit out(c.n_qubits());
  for (const auto& g : c) {
    const int q = g.qubits[0];
    switch (g.kind) {
      case GateKind::RX:
        // U(theta, -pi/2, pi/2)
        out.add(Gate::rz(q, pi / 2));
        out.add(Gate::sx(q));
        out.add(Gate::rz(q, g.angle + pi));
        out.add(Gate::sx(q));
        out.add(Gate::rz(q, pi / 2));
        break;
      case GateKind::RY:
        // U(theta, 0, 0)
        out.add(Gate::rz(q, 0.0));
        out.add(Gate::sx(q));
        out.add(Gate::rz(q, g.angle + pi));
        out.add(Gate::sx(q));
        out.add(Gate::rz(q, pi));
        break;
      case GateKind::H:
        out.add(Gate::rz(q, pi / 2));
        out.add(Gate::sx(q));
        out.add(Gate::rz(q, pi / 2));
        break;
      case GateKind::RZ:
      case GateKind::SX:
      case GateKind::X:
      case GateKind::CX:
        out.add(g);
        break;
    }
  }
  return out;
}

CircuitMetrics circuit_metrics(const Circuit& c) {
  CircuitMetrics m;
  m.n_qubits = c.n_qubits();
  std::vector<int> layer(static_cast<std::size_t>(c.n_qubits()), 0);
  for (const auto& g : c) {
    int l = layer[g.qubits[0]];
    if (g.arity() == 2) l = std::max(l, layer[g.qubits[1]]);
    ++l;
    layer[g.qubits[0]] = l;
    if (g.arity() == 2) {
      layer[g.qubits[1]] = l;
      ++m.two_qubit_count;
    }
    if (is_rotation(g.kind)) ++m.gate_slot_count;
    ++m.gate_count;
  }
  m.depth = layer.empty() ? 0 : *std::max_element(layer.begin(), layer.end());
  return m;
}

Circuit adjoint(const Circuit& c) {
  using std::numbers::pi;
  Circuit out(c.n_qubits());
  for (auto it = c.gates().rbegin(); it != c.gates().rend(); ++it) {
    Gate g = *it;
    switch (g.kind) {
      case GateKind::RX:
      case GateKind::RY:
      case GateKind::RZ:
        g.angle = -g.angle;
        out.add(g);
        break;
      case GateKind::SX:
        out.add(Gate::rz(g.qubits[0], pi));
        out.add(g);
        out.add(Gate::rz(g.qubits[0], pi));
        break;
      case GateKind::X:
      case GateKind::H:
      case GateKind::CX:
        out.add(g);
        break;
    }
  }
  return out;
}

}  // namespace qkb
