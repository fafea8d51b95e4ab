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

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include "qkbench/kern.hpp"
#include "qkbench/rng.hpp"

namespace qkb {
namespace {

namespace fs = std::filesystem;
using std::numbers::pi;

constexpr FeatureMapKind kAllMaps[] = {FeatureMapKind::rot2dof, FeatureMapKind::belis, FeatureMapKind::sakhnenko10,
                                       FeatureMapKind::zzfm};

Matrix random_matrix(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols, double scale = pi) {
  Matrix X(rows, cols);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = scale * (2.0 * rng.uniform() - 1.0);
  return X;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qkbench_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(Hash, MurmurReferenceVectors) {
  EXPECT_EQ(content_hash("hello").hex(), "029bbd41b3a7d8cb191dae486a901e5b");
  EXPECT_EQ(content_hash("The quick brown fox jumps over the lazy dog").hex(), "6c1b07bc7bbc4be347939ac4a93c437a");
  EXPECT_EQ(content_hash("").hex(), "00000000000000000000000000000000");
}

TEST(Hash, HexRoundTrip) {
  const Hash128 h = content_hash("qkbench");
  EXPECT_EQ(Hash128::from_hex(h.hex()), h);
  EXPECT_THROW(Hash128::from_hex("abc"), std::invalid_argument);
}

TEST(Kern, IdealDiagonalOne) {
  SplitMix64 rng(2);
  for (FeatureMapKind kind : kAllMaps) {
    const Matrix X = random_matrix(rng, 12, 5);
    const KernelMatrix K = quantum_kernel_ideal(X, X, {kind, 5, 2, std::nullopt});
    for (Eigen::Index i = 0; i < 12; ++i) EXPECT_NEAR(K.values(i, i), 1.0, 1e-12);
    EXPECT_EQ(K.provenance.pathway, Pathway::ideal);
  }
}

TEST(Kern, Rot2dofOrthogonalPair) {
  Matrix X(1, 2);
  X << pi, 0.0;
  Matrix Z(1, 2);
  Z << 0.0, 0.0;
  const KernelMatrix K = quantum_kernel_ideal(X, Z, {FeatureMapKind::rot2dof, 2, 1, std::nullopt});
  EXPECT_NEAR(K.values(0, 0), 0.0, 1e-15);
}

TEST(Kern, Rot2dofClosedForm) {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix X = random_matrix(rng, 1, 2);
    Matrix Z = random_matrix(rng, 1, 2);
    Z(0, 1) = X(0, 1);
    const double expected = std::pow(std::cos((X(0, 0) - Z(0, 0)) / 2.0), 2);
    const KernelMatrix K = quantum_kernel_ideal(X, Z, {FeatureMapKind::rot2dof, 2, 1, std::nullopt});
    EXPECT_NEAR(K.values(0, 0), expected, 1e-12);
  }
}

TEST(Kern, TrainVariantMatchesCross) {
  SplitMix64 rng(5);
  for (FeatureMapKind kind : kAllMaps) {
    const Matrix X = random_matrix(rng, 9, 4);
    const FeatureMapSpec spec{kind, 4, 2, std::nullopt};
    const Matrix a = quantum_kernel_ideal(X, spec).values;
    const Matrix b = quantum_kernel_ideal(X, X, spec).values;
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(a, a.transpose());
  }
}

TEST(Kern, IdealTrainKernelAlgebra) {
  SplitMix64 rng(31);
  for (FeatureMapKind kind : kAllMaps) {
    for (int k : {1, 3, 6}) {
      const Matrix X = random_matrix(rng, 25, k);
      const Matrix K = quantum_kernel_ideal(X, {kind, k, 2, std::nullopt}).values;
      EXPECT_LT((K - K.transpose()).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_GE(min_eigenvalue(K), -1e-9);
      EXPECT_LE(K.maxCoeff(), 1.0 + 1e-12);
      EXPECT_GE(K.minCoeff(), 0.0);
    }
  }
}

TEST(Kern, NoisyAtZeroNoiseEqualsIdeal) {
  SplitMix64 rng(13);
  for (FeatureMapKind kind : kAllMaps) {
    const Matrix X = random_matrix(rng, 8, 4);
    const FeatureMapSpec spec{kind, 4, 2, std::nullopt};
    const Matrix ideal = quantum_kernel_ideal(X, spec).values;
    const KernelMatrix noisy = quantum_kernel_noisy(X, spec, {0.0, 0.0});
    EXPECT_LT((ideal - noisy.values).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(noisy.provenance.pathway, Pathway::noisy);
  }
}

TEST(Kern, NoisyDiagonalIsPurity) {
  SplitMix64 rng(14);
  const Matrix X = random_matrix(rng, 6, 4);
  const Matrix K = quantum_kernel_noisy(X, {FeatureMapKind::belis, 4, 2, std::nullopt}, kDefaultNoise).values;
  for (Eigen::Index i = 0; i < 6; ++i) EXPECT_LT(K(i, i), 1.0);
  EXPECT_LT((K - K.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_GE(min_eigenvalue(K), -1e-9);
}

// On one qubit the channel commutes with every gate, so the entry is
// (1 + c^2 r.s) / 2 and moves monotonically from the ideal value to 1/2.
TEST(Kern, NoiseContractsTowardMixedLimitOneQubit) {
  SplitMix64 rng(15);
  for (FeatureMapKind kind : kAllMaps) {
    const int k = kind == FeatureMapKind::zzfm ? 1 : 2;
    const FeatureMapSpec spec{kind, k, 2, std::nullopt};
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix X = random_matrix(rng, 1, k);
      const Matrix Z = random_matrix(rng, 1, k);
      const double ideal = quantum_kernel_ideal(X, Z, spec).values(0, 0);
      const double mixed = 0.5;
      double previous_gap = std::abs(ideal - mixed);
      for (double p : {0.05, 0.1, 0.3, 0.6, 0.9, 1.0}) {
        const double v = quantum_kernel_noisy(X, Z, spec, {p, p}).values(0, 0);
        EXPECT_GE(v, std::min(ideal, mixed) - 1e-12);
        EXPECT_LE(v, std::max(ideal, mixed) + 1e-12);
        const double gap = std::abs(v - mixed);
        EXPECT_LE(gap, previous_gap + 1e-12);
        previous_gap = gap;
      }
      EXPECT_NEAR(previous_gap, 0.0, 1e-12);
    }
  }
}

// Two qubits: the endpoints are fixed, but the path between them need not
// stay inside [ideal, 1/4] because the per-qubit factors move in opposite
// directions.
TEST(Kern, NoiseEndpointsTwoQubits) {
  SplitMix64 rng(16);
  const FeatureMapSpec spec{FeatureMapKind::belis, 4, 1, std::nullopt};
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix X = random_matrix(rng, 1, 4);
    const Matrix Z = random_matrix(rng, 1, 4);
    EXPECT_NEAR(quantum_kernel_noisy(X, Z, spec, {0.0, 0.0}).values(0, 0),
                quantum_kernel_ideal(X, Z, spec).values(0, 0), 1e-12);
    EXPECT_NEAR(quantum_kernel_noisy(X, Z, spec, {1.0, 1.0}).values(0, 0), 0.25, 1e-12);
  }
}

TEST(Kern, DimensionMismatch) {
  const Matrix X = Matrix::Zero(3, 4);
  const Matrix Z = Matrix::Zero(3, 3);
  EXPECT_THROW(quantum_kernel_ideal(X, Z, {FeatureMapKind::rot2dof, 4, 2, std::nullopt}), std::invalid_argument);
  EXPECT_THROW(quantum_kernel_ideal(X, {FeatureMapKind::rot2dof, 3, 2, std::nullopt}), std::invalid_argument);
  EXPECT_THROW(classical_kernel(X, Z, ClassicalKind::linear), std::invalid_argument);
}

TEST(Kern, ClassicalExamples) {
  Matrix x(1, 2);
  x << 1.0, 2.0;
  Matrix z(1, 2);
  z << 3.0, 4.0;
  EXPECT_DOUBLE_EQ(classical_kernel(x, z, ClassicalKind::linear).values(0, 0), 11.0);

  SplitMix64 rng(3);
  const Matrix X = random_matrix(rng, 10, 3);
  const Matrix R = classical_kernel(X, X, ClassicalKind::rbf_scale).values;
  for (Eigen::Index i = 0; i < 10; ++i) EXPECT_DOUBLE_EQ(R(i, i), 1.0);

  Matrix a(1, 2);
  a << 1.0, 0.0;
  Matrix b(1, 2);
  b << 0.0, 5.0;
  EXPECT_DOUBLE_EQ(classical_kernel(a, b, ClassicalKind::poly3, 0.7).values(0, 0), 0.0);
}

TEST(Kern, RbfGammaFromTrainingSide) {
  SplitMix64 rng(4);
  const Matrix X = random_matrix(rng, 15, 3);
  const Matrix Z = random_matrix(rng, 5, 3, 10.0);
  // Population variance over all entries, computed directly.
  const double mean = X.mean();
  const double var = (X.array() - mean).square().sum() / static_cast<double>(X.size());
  const double gamma = 1.0 / (3.0 * var);
  EXPECT_NEAR(rbf_scale_gamma(X), gamma, 1e-14);
  const Matrix K = classical_kernel(Z, X, ClassicalKind::rbf_scale, gamma).values;
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = 0; j < 15; ++j) {
      EXPECT_NEAR(K(i, j), std::exp(-gamma * (Z.row(i) - X.row(j)).squaredNorm()), 1e-14);
    }
  }
  const Matrix P = classical_kernel(X, Z, ClassicalKind::poly3).values;
  EXPECT_NEAR(P(2, 3), std::pow(gamma * X.row(2).dot(Z.row(3)), 3), 1e-12);
}

TEST(Kern, RbfZeroVarianceNamesDataset) {
  const Matrix X = Matrix::Constant(4, 2, 1.5);
  try {
    rbf_scale_gamma(X, "flatland");
    FAIL() << "expected a throw";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("flatland"), std::string::npos);
  }
}

TEST(Kern, CompareKernelsExamples) {
  SplitMix64 rng(6);
  const Matrix X = random_matrix(rng, 10, 3);
  const Matrix K = quantum_kernel_ideal(X, {FeatureMapKind::rot2dof, 3, 2, std::nullopt}).values;

  const KernelAgreement same = compare_kernels(K, K);
  EXPECT_NEAR(same.pearson_r, 1.0, 1e-12);
  EXPECT_EQ(same.mae, 0.0);
  EXPECT_EQ(same.rmse, 0.0);

  Matrix shifted = K;
  for (Eigen::Index i = 0; i < 10; ++i) {
    for (Eigen::Index j = 0; j < 10; ++j) {
      if (i != j) shifted(i, j) += 0.01;
    }
  }
  const KernelAgreement s = compare_kernels(K, shifted);
  EXPECT_NEAR(s.mae, 0.01, 1e-12);
  EXPECT_NEAR(s.rmse, 0.01, 1e-12);
  EXPECT_NEAR(s.pearson_r, 1.0, 1e-12);
  EXPECT_LE(s.mae, s.rmse + 1e-15);

  Matrix neg = K;
  for (Eigen::Index i = 0; i < 10; ++i) {
    for (Eigen::Index j = 0; j < 10; ++j) {
      if (i != j) neg(i, j) = -K(i, j);
    }
  }
  EXPECT_NEAR(compare_kernels(K, neg).pearson_r, -1.0, 1e-12);
  EXPECT_NEAR(compare_kernels(K, neg).spearman_rho, -1.0, 1e-12);

  EXPECT_THROW(compare_kernels(K, Matrix::Zero(9, 9)), std::invalid_argument);
  EXPECT_THROW(compare_kernels(Matrix::Identity(1, 1), Matrix::Identity(1, 1)), std::invalid_argument);
}

TEST(KernIo, ContainerRoundTripBitIdentical) {
  const fs::path dir = scratch_dir("io");
  SplitMix64 rng(8);
  KernelMatrix K{random_matrix(rng, 7, 5), {}};
  K.provenance.pathway = Pathway::noisy;
  K.provenance.config_hash = content_hash("cfg");
  K.values(0, 0) = std::numeric_limits<double>::denorm_min();
  write_kernel_file(dir / "k.qkb", K);
  const KernelMatrix back = read_kernel_file(dir / "k.qkb");
  EXPECT_EQ(back.values, K.values);
  EXPECT_EQ(back.provenance.pathway, Pathway::noisy);
  EXPECT_EQ(back.provenance.config_hash, K.provenance.config_hash);
  EXPECT_EQ(fs::file_size(dir / "k.qkb"), 16U + 4 + 4 + 1 + 16 + 35 * 8);

  const KernelMatrix imported = import_kernel(dir / "k.qkb");
  EXPECT_EQ(imported.values, K.values);
  EXPECT_EQ(imported.provenance.pathway, Pathway::imported);
}

TEST(KernIo, ContainerLayout) {
  const fs::path dir = scratch_dir("layout");
  Matrix v(1, 2);
  v << 1.0, -2.0;
  KernelMatrix K{v, {}};
  K.provenance.pathway = Pathway::classical;
  write_kernel_file(dir / "k.qkb", K);
  std::ifstream in(dir / "k.qkb", std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ASSERT_EQ(bytes.size(), 16U + 25 + 16);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 8), "QKBKERN1");
  for (int i = 8; i < 16; ++i) EXPECT_EQ(bytes[static_cast<std::size_t>(i)], 0);
  EXPECT_EQ(bytes[16], 1);  // rows, little-endian u32
  EXPECT_EQ(bytes[20], 2);  // cols
  EXPECT_EQ(bytes[24], 2);  // pathway code
  double second = 0.0;
  std::memcpy(&second, bytes.data() + 41 + 8, 8);
  EXPECT_EQ(second, -2.0);
}

TEST(KernIo, MalformedFilesRejected) {
  const fs::path dir = scratch_dir("bad");
  {
    std::ofstream out(dir / "short.qkb", std::ios::binary);
    out << "QKBKERN";
  }
  EXPECT_THROW(read_kernel_file(dir / "short.qkb"), std::runtime_error);
  {
    std::ofstream out(dir / "nan.csv");
    out << "1,0.5\n0.5,nan\n";
  }
  EXPECT_THROW(import_kernel(dir / "nan.csv"), std::runtime_error);
  KernelMatrix K{Matrix::Identity(2, 2), {}};
  K.values(1, 0) = std::numeric_limits<double>::quiet_NaN();
  write_kernel_file(dir / "nan.qkb", K);
  EXPECT_THROW(import_kernel(dir / "nan.qkb"), std::runtime_error);
  {
    std::ofstream out(dir / "ragged.csv");
    out << "1,0.5\n0.5\n";
  }
  EXPECT_THROW(import_kernel(dir / "ragged.csv"), std::runtime_error);
}

TEST(KernIo, CsvRoundTrip) {
  const fs::path dir = scratch_dir("csv");
  SplitMix64 rng(12);
  const Matrix M = random_matrix(rng, 4, 4);
  write_kernel_csv(dir / "k.csv", M);
  EXPECT_EQ(read_kernel_csv(dir / "k.csv"), M);
  EXPECT_EQ(import_kernel(dir / "k.csv").values, M);
}

TEST(KernIo, IndefiniteImportFlagged) {
  // 60x60 symmetric with one eigenvalue at -0.003.
  SplitMix64 rng(19);
  const Matrix A = random_matrix(rng, 60, 60, 1.0);
  const Eigen::HouseholderQR<Matrix> qr(A);
  const Matrix Q = qr.householderQ();
  Vector eig = Vector::LinSpaced(60, 0.1, 2.0);
  eig(0) = -0.003;
  const Matrix K = Q * eig.asDiagonal() * Q.transpose();
  const fs::path dir = scratch_dir("indef");
  write_kernel_csv(dir / "k.csv", K);
  const KernelMatrix imported = import_kernel(dir / "k.csv");
  EXPECT_TRUE(imported.provenance.indefinite);
  EXPECT_NEAR(min_eigenvalue(imported.values), -0.003, 1e-9);
}

TEST(KernCache, PutGetAndMiss) {
  const fs::path dir = scratch_dir("cache");
  const KernelCache cache(dir);
  SplitMix64 rng(20);
  const KernelMatrix K{random_matrix(rng, 6, 6), {}};
  const Hash128 key = content_hash("dataset=a;fold=0;map=rot2dof;reps=2");
  EXPECT_FALSE(cache.get(key).has_value());
  cache.put(key, K);
  const auto hit = cache.get(key);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->values, K.values);
  EXPECT_NE(key, content_hash("dataset=a;fold=0;map=rot2dof;reps=3"));
}

TEST(KernCache, CorruptFileIsMiss) {
  const fs::path dir = scratch_dir("corrupt");
  const KernelCache cache(dir);
  const Hash128 key = content_hash("x");
  cache.put(key, {Matrix::Identity(3, 3), {}});
  {
    std::ofstream out(cache.path_for(key), std::ios::binary | std::ios::trunc);
    out << "garbage";
  }
  EXPECT_FALSE(cache.get(key).has_value());
}

}  // namespace
}  // namespace qkb
