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

#include "qkbench/sim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <algorithm>
#include <utility>

namespace qkb {

namespace {

constexpr cplx kI{0.0, 1.0};

// Plain complex product. std::complex operator* goes through the out-of-line
// inf/NaN recovery path under GCC, which dominates the inner loops below.
inline cplx mul(const cplx& a, const cplx& b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// Applies a 2x2 matrix to bit `bit` of a flat 2^N amplitude array.
void apply_1q(std::vector<cplx>& v, std::size_t bit, const Mat2& m) {
  const std::size_t stride = std::size_t{1} << bit;
  const std::size_t n = v.size();
  for (std::size_t base = 0; base < n; base += 2 * stride) {
    for (std::size_t off = 0; off < stride; ++off) {
      const std::size_t i0 = base + off;
      const std::size_t i1 = i0 + stride;
      const cplx a = v[i0];
      const cplx b = v[i1];
      v[i0] = mul(m[0], a) + mul(m[1], b);
      v[i1] = mul(m[2], a) + mul(m[3], b);
    }
  }
}

// Inserts a zero bit at position `bit` of j.
inline std::size_t insert_zero(std::size_t j, std::size_t bit) {
  const std::size_t low = j & ((std::size_t{1} << bit) - 1);
  return ((j >> bit) << (bit + 1)) | low;
}

void apply_cx(std::vector<cplx>& v, std::size_t control, std::size_t target) {
  const std::size_t cmask = std::size_t{1} << control;
  const std::size_t tmask = std::size_t{1} << target;
  const std::size_t lo = std::min(control, target);
  const std::size_t hi = std::max(control, target);
  // Visit only indices with the control bit set and the target bit clear.
  for (std::size_t j = 0; j < v.size() / 4; ++j) {
    const std::size_t i = insert_zero(insert_zero(j, lo), hi) | cmask;
    std::swap(v[i], v[i | tmask]);
  }
}

Mat2 conj(const Mat2& m) { return {std::conj(m[0]), std::conj(m[1]), std::conj(m[2]), std::conj(m[3])}; }

void check_width(const Circuit& c, int cap, const char* what) {
  if (c.n_qubits() > cap) {
    throw std::invalid_argument(std::string(what) + " cap is " + std::to_string(cap) + " qubits, circuit has " +
                                std::to_string(c.n_qubits()));
  }
}

}  // namespace

Mat2 gate_matrix(const Gate& gate) {
  const double c = std::cos(gate.angle / 2);
  const double s = std::sin(gate.angle / 2);
  switch (gate.kind) {
    case GateKind::RX: return {c, -kI * s, -kI * s, c};
    case GateKind::RY: return {c, -s, s, c};
    case GateKind::RZ: return {std::polar(1.0, -gate.angle / 2), 0.0, 0.0, std::polar(1.0, gate.angle / 2)};
    case GateKind::SX: return {cplx{0.5, 0.5}, cplx{0.5, -0.5}, cplx{0.5, -0.5}, cplx{0.5, 0.5}};
    case GateKind::X: return {0.0, 1.0, 1.0, 0.0};
    case GateKind::H: {
      const double r = 1.0 / std::sqrt(2.0);
      return {r, r, r, -r};
    }
    case GateKind::CX: break;
  }
  throw std::invalid_argument("gate_matrix: CX is not a single-qubit gate");
}

// ---------------------------------------------------------------- Statevector

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > 30) throw std::invalid_argument("statevector width out of range");
  amps_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
  amps_[0] = 1.0;
}

void Statevector::apply(const Gate& gate) {
  if (gate.kind == GateKind::CX) {
    apply_cx(amps_, static_cast<std::size_t>(gate.qubits[0]), static_cast<std::size_t>(gate.qubits[1]));
  } else {
    apply_1q(amps_, static_cast<std::size_t>(gate.qubits[0]), gate_matrix(gate));
  }
}

void Statevector::apply(const Circuit& c) {
  if (c.n_qubits() != n_qubits_) throw std::invalid_argument("circuit width differs from statevector width");
  for (const auto& g : c) apply(g);
}

double Statevector::norm() const {
  double acc = 0.0;
  for (const auto& a : amps_) acc += std::norm(a);
  return std::sqrt(acc);
}

cplx Statevector::inner(const Statevector& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("inner product of statevectors with different widths");
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < amps_.size(); ++i) acc += std::conj(amps_[i]) * other.amps_[i];
  return acc;
}

Statevector run_statevector(const Circuit& c, int cap) {
  check_width(c, cap, "statevector");
  Statevector sv(c.n_qubits());
  sv.apply(c);
  return sv;
}

// ---------------------------------------------------------------- NoiseModel

void NoiseModel::validate() const {
  if (!(p1q >= 0.0 && p1q <= 1.0) || !(p2q >= 0.0 && p2q <= 1.0)) {
    throw std::invalid_argument("depolarising rates must lie in [0, 1]");
  }
}

// ---------------------------------------------------------------- DensityMatrix

DensityMatrix::DensityMatrix(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > 14) throw std::invalid_argument("density matrix width out of range");
  dim_ = std::size_t{1} << n_qubits;
  data_.assign(dim_ * dim_, cplx{0.0, 0.0});
  data_[0] = 1.0;
}

// rho is stored as a 2n-qubit vector: row bits 0..n-1, column bits n..2n-1.
// G rho G^dagger acts as G on the row bit and conj(G) on the column bit.
void DensityMatrix::apply_unitary(const Gate& gate) {
  const auto n = static_cast<std::size_t>(n_qubits_);
  if (gate.kind == GateKind::CX) {
    const auto c = static_cast<std::size_t>(gate.qubits[0]);
    const auto t = static_cast<std::size_t>(gate.qubits[1]);
    apply_cx(data_, c, t);
    apply_cx(data_, c + n, t + n);
    return;
  }
  const Mat2 m = gate_matrix(gate);
  const auto q = static_cast<std::size_t>(gate.qubits[0]);
  apply_1q(data_, q, m);
  apply_1q(data_, q + n, conj(m));
}

void DensityMatrix::depolarize(int qubit, double p) {
  if (p == 0.0) return;
  const std::size_t rbit = std::size_t{1} << qubit;
  const std::size_t cbit = rbit << n_qubits_;
  const std::size_t both = rbit | cbit;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (i & both) continue;
    const cplx d00 = data_[i];
    const cplx d11 = data_[i | both];
    const cplx avg = 0.5 * (d00 + d11);
    data_[i] = (1.0 - p) * d00 + p * avg;
    data_[i | both] = (1.0 - p) * d11 + p * avg;
    data_[i | rbit] *= (1.0 - p);
    data_[i | cbit] *= (1.0 - p);
  }
}

void DensityMatrix::depolarize(int qubit_a, int qubit_b, double p) {
  if (p == 0.0) return;
  const std::size_t ra = std::size_t{1} << qubit_a;
  const std::size_t rb = std::size_t{1} << qubit_b;
  const std::size_t ca = ra << n_qubits_;
  const std::size_t cb = rb << n_qubits_;
  const std::size_t mask = ra | rb | ca | cb;
  const std::array<std::size_t, 4> row_off{0, ra, rb, ra | rb};
  const std::array<std::size_t, 4> col_off{0, ca, cb, ca | cb};
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (i & mask) continue;
    cplx acc{0.0, 0.0};
    for (int s = 0; s < 4; ++s) acc += data_[i | row_off[s] | col_off[s]];
    const cplx avg = 0.25 * acc;
    for (int s = 0; s < 4; ++s) {
      for (int t = 0; t < 4; ++t) {
        cplx& e = data_[i | row_off[s] | col_off[t]];
        e = (s == t) ? (1.0 - p) * e + p * avg : (1.0 - p) * e;
      }
    }
  }
}

cplx DensityMatrix::trace() const {
  cplx acc{0.0, 0.0};
  for (std::size_t r = 0; r < dim_; ++r) acc += (*this)(r, r);
  return acc;
}

double DensityMatrix::purity() const { return hs_inner(*this); }

double DensityMatrix::hs_inner(const DensityMatrix& other) const {
  if (other.dim_ != dim_) throw std::invalid_argument("Hilbert-Schmidt product of differently sized states");
  // Tr(A B) = sum_{r,c} A(r,c) B(c,r) = sum A(r,c) conj(B(r,c)) for Hermitian B.
  double acc = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    acc += data_[i].real() * other.data_[i].real() + data_[i].imag() * other.data_[i].imag();
  }
  return acc;
}

DensityMatrix run_density(const Circuit& c, const NoiseModel& noise, int cap) {
  check_width(c, cap, "density-matrix");
  noise.validate();
  DensityMatrix rho(c.n_qubits());
  for (const auto& g : c) {
    rho.apply_unitary(g);
    if (g.arity() == 2) {
      rho.depolarize(g.qubits[0], g.qubits[1], noise.p2q);
    } else {
      rho.depolarize(g.qubits[0], noise.p1q);
    }
  }
  return rho;
}

}  // namespace qkb
