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
#include <complex>
#include <cstddef>
#include <vector>

#include "qkbench/circuit.hpp"

namespace qkb {

using cplx = std::complex<double>;

/// Row-major 2x2 single-qubit unitary.
using Mat2 = std::array<cplx, 4>;

/// Matrix of a single-qubit gate. Throws std::invalid_argument for CX.
Mat2 gate_matrix(const Gate& gate);

inline constexpr int kStatevectorCap = 16;
inline constexpr int kDensityCap = 10;

class Statevector {
 public:
  /// |0...0> on n qubits.
  explicit Statevector(int n_qubits);

  [[nodiscard]] int n_qubits() const { return n_qubits_; }
  [[nodiscard]] std::size_t dim() const { return amps_.size(); }
  [[nodiscard]] const std::vector<cplx>& amplitudes() const { return amps_; }
  [[nodiscard]] cplx operator[](std::size_t i) const { return amps_[i]; }

  void apply(const Gate& gate);
  void apply(const Circuit& c);

  [[nodiscard]] double norm() const;
  /// <this|other>
  [[nodiscard]] cplx inner(const Statevector& other) const;

 private:
  int n_qubits_;
  std::vector<cplx> amps_;
};

/// Depolarising rates. p is the probability that the touched qubits are
/// replaced by the maximally mixed state after a gate fires.
struct NoiseModel {
  double p1q = 0.0;
  double p2q = 0.0;

  void validate() const;
  [[nodiscard]] bool noiseless() const { return p1q == 0.0 && p2q == 0.0; }
  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

/// Rates used for the noisy pathway in the benchmark: 1e-3 / 1e-2.
inline constexpr NoiseModel kDefaultNoise{1e-3, 1e-2};

class DensityMatrix {
 public:
  /// |0...0><0...0| on n qubits.
  explicit DensityMatrix(int n_qubits);

  [[nodiscard]] int n_qubits() const { return n_qubits_; }
  [[nodiscard]] std::size_t dim() const { return dim_; }
  /// rho(row, col)
  [[nodiscard]] cplx operator()(std::size_t row, std::size_t col) const { return data_[row + col * dim_]; }
  /// Column-major storage, rho(row, col) at row + col * dim.
  [[nodiscard]] const std::vector<cplx>& data() const { return data_; }

  void apply_unitary(const Gate& gate);
  /// rho <- (1-p) rho + p * (I/2 ⊗ Tr_q rho)
  void depolarize(int qubit, double p);
  /// rho <- (1-p) rho + p * (I/4 ⊗ Tr_{a,b} rho)
  void depolarize(int qubit_a, int qubit_b, double p);

  [[nodiscard]] cplx trace() const;
  [[nodiscard]] double purity() const;
  /// Tr(this * other)
  [[nodiscard]] double hs_inner(const DensityMatrix& other) const;

 private:
  int n_qubits_;
  std::size_t dim_;
  std::vector<cplx> data_;
};

/// U(c)|0...0>. Throws std::invalid_argument when c is wider than `cap`.
Statevector run_statevector(const Circuit& c, int cap = kStatevectorCap);

/// Density-matrix evolution with the depolarising channel applied after every
/// gate on that gate's qubits.
DensityMatrix run_density(const Circuit& c, const NoiseModel& noise, int cap = kDensityCap);

}  // namespace qkb
