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

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "qkbench/circuit.hpp"
#include "qkbench/sim.hpp"

namespace qkb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// ---------------------------------------------------------------- hashing

/// 128-bit content hash (MurmurHash3 x64_128, seed 0).
struct Hash128 {
  std::array<std::uint8_t, 16> bytes{};

  [[nodiscard]] std::string hex() const;
  static Hash128 from_hex(std::string_view hex);
  friend bool operator==(const Hash128&, const Hash128&) = default;
};

Hash128 content_hash(std::string_view data);

// ---------------------------------------------------------------- KernelMatrix

enum class Pathway : std::uint8_t { ideal = 0, noisy = 1, classical = 2, imported = 3 };

std::string_view to_string(Pathway p);
Pathway pathway_from_string(std::string_view name);

struct Provenance {
  Pathway pathway = Pathway::ideal;
  Hash128 config_hash;
  NoiseModel noise;
  std::string timestamp;  // UTC, ISO-8601
  double wall_time_s = 0.0;
  bool indefinite = false;
};

struct KernelMatrix {
  Matrix values;
  Provenance provenance;

  [[nodiscard]] Eigen::Index rows() const { return values.rows(); }
  [[nodiscard]] Eigen::Index cols() const { return values.cols(); }
};

std::string utc_timestamp();

// ---------------------------------------------------------------- assembly

/// Fidelity kernel |<psi(x_i)|psi(z_j)>|^2 from one statevector run per row.
KernelMatrix quantum_kernel_ideal(const Matrix& X, const Matrix& Z, const FeatureMapSpec& spec);
/// Train x train variant; fills the upper triangle and mirrors it.
KernelMatrix quantum_kernel_ideal(const Matrix& X, const FeatureMapSpec& spec);

/// Hilbert-Schmidt kernel Tr(rho(x_i) rho(z_j)) from one density run per row.
KernelMatrix quantum_kernel_noisy(const Matrix& X, const Matrix& Z, const FeatureMapSpec& spec,
                                  const NoiseModel& noise);
KernelMatrix quantum_kernel_noisy(const Matrix& X, const FeatureMapSpec& spec, const NoiseModel& noise);

enum class ClassicalKind { linear, rbf_scale, poly3 };

std::string_view to_string(ClassicalKind kind);
ClassicalKind classical_from_string(std::string_view name);

/// gamma = 1 / (d * Var(X)) with Var the population variance over every
/// entry of the training matrix. Throws when the variance is zero; `name`
/// identifies the dataset in the message.
double rbf_scale_gamma(const Matrix& X_train, std::string_view name = "");

/// Classical kernel between rows of X (training side) and Z. gamma for
/// rbf_scale and poly3 always comes from X.
KernelMatrix classical_kernel(const Matrix& X, const Matrix& Z, ClassicalKind kind, std::string_view name = "");
/// Same, with an explicitly supplied gamma (used for test x train blocks).
KernelMatrix classical_kernel(const Matrix& X, const Matrix& Z, ClassicalKind kind, double gamma);

// ---------------------------------------------------------------- agreement

struct KernelAgreement {
  double pearson_r = 0.0;
  double spearman_rho = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  double rel_frobenius = 0.0;
};

/// Statistics over the strict upper triangle of two same-shape square matrices.
KernelAgreement compare_kernels(const Matrix& reference, const Matrix& other);

/// Minimum eigenvalue of the symmetrised matrix.
double min_eigenvalue(const Matrix& K);

// ---------------------------------------------------------------- file formats

/// Binary container: 16-byte magic "QKBKERN1\0...", u32 rows, u32 cols,
/// u8 pathway, 16-byte hash, row-major little-endian f64 values.
void write_kernel_file(const std::filesystem::path& path, const KernelMatrix& K);
/// Reads a container file with its stored pathway.
KernelMatrix read_kernel_file(const std::filesystem::path& path);

void write_kernel_csv(const std::filesystem::path& path, const Matrix& K);
Matrix read_kernel_csv(const std::filesystem::path& path);

/// Loads an externally produced matrix (container or .csv). The pathway is
/// forced to `imported`; negative eigenvalues are kept and flagged.
KernelMatrix import_kernel(const std::filesystem::path& path);

// ---------------------------------------------------------------- cache

/// Content-addressed on-disk kernel store, one container file per key.
/// Writers go through write-then-rename so concurrent readers never see a
/// partial file.
class KernelCache {
 public:
  explicit KernelCache(std::filesystem::path dir);

  /// Directory from QKBENCH_CACHE_DIR, else `fallback`.
  static std::filesystem::path default_dir(const std::filesystem::path& fallback = ".qkbench-cache");

  [[nodiscard]] std::optional<KernelMatrix> get(const Hash128& key) const;
  void put(const Hash128& key, const KernelMatrix& K) const;

  [[nodiscard]] std::filesystem::path path_for(const Hash128& key) const;
  [[nodiscard]] const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace qkb
