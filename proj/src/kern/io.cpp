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

#include <unistd.h>

#include <array>
#include <atomic>
#include <cstdlib>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkbench/kern.hpp"

namespace qkb {

namespace {

constexpr std::array<char, 16> kMagic{'Q', 'K', 'B', 'K', 'E', 'R', 'N', '1', 0, 0, 0, 0, 0, 0, 0, 0};
constexpr std::size_t kHeaderSize = 16 + 4 + 4 + 1 + 16;
constexpr double kIndefiniteTol = -1e-9;

void put_u32(std::vector<char>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

void put_f64(std::vector<char>& buf, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double get_f64(const char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | static_cast<unsigned char>(p[i]);
  return std::bit_cast<double>(bits);
}

std::vector<char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open kernel file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void flag_indefinite(KernelMatrix& K) {
  if (K.rows() == K.cols() && K.rows() > 0) {
    K.provenance.indefinite = min_eigenvalue(K.values) < kIndefiniteTol;
  }
}

}  // namespace

void write_kernel_file(const std::filesystem::path& path, const KernelMatrix& K) {
  std::vector<char> buf(kMagic.begin(), kMagic.end());
  put_u32(buf, static_cast<std::uint32_t>(K.rows()));
  put_u32(buf, static_cast<std::uint32_t>(K.cols()));
  buf.push_back(static_cast<char>(K.provenance.pathway));
  buf.insert(buf.end(), K.provenance.config_hash.bytes.begin(), K.provenance.config_hash.bytes.end());
  for (Eigen::Index i = 0; i < K.rows(); ++i) {
    for (Eigen::Index j = 0; j < K.cols(); ++j) put_f64(buf, K.values(i, j));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write kernel file " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("short write to kernel file " + path.string());
}

KernelMatrix read_kernel_file(const std::filesystem::path& path) {
  const auto buf = read_all(path);
  if (buf.size() < kHeaderSize || std::memcmp(buf.data(), kMagic.data(), kMagic.size()) != 0) {
    throw std::runtime_error("malformed kernel header in " + path.string());
  }
  const std::uint32_t rows = get_u32(buf.data() + 16);
  const std::uint32_t cols = get_u32(buf.data() + 20);
  const auto code = static_cast<std::uint8_t>(buf[24]);
  if (code > 3) throw std::runtime_error("unknown pathway code in " + path.string());
  const std::size_t expected = kHeaderSize + std::size_t{rows} * cols * 8;
  if (buf.size() != expected) {
    throw std::runtime_error("kernel file " + path.string() + " has " + std::to_string(buf.size()) +
                             " bytes, header implies " + std::to_string(expected));
  }
  KernelMatrix K;
  K.provenance.pathway = static_cast<Pathway>(code);
  std::memcpy(K.provenance.config_hash.bytes.data(), buf.data() + 25, 16);
  K.values.resize(rows, cols);
  const char* p = buf.data() + kHeaderSize;
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j, p += 8) {
      const double v = get_f64(p);
      if (!std::isfinite(v)) {
        throw std::runtime_error("non-finite kernel entry at (" + std::to_string(i) + ", " + std::to_string(j) +
                                 ") in " + path.string());
      }
      K.values(i, j) = v;
    }
  }
  return K;
}

void write_kernel_csv(const std::filesystem::path& path, const Matrix& K) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  for (Eigen::Index i = 0; i < K.rows(); ++i) {
    for (Eigen::Index j = 0; j < K.cols(); ++j) {
      if (j) out << ',';
      out << K(i, j);
    }
    out << '\n';
  }
}

Matrix read_kernel_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || !std::isfinite(v)) {
        throw std::runtime_error("bad kernel entry '" + cell + "' on line " + std::to_string(lineno) + " of " +
                                 path.string());
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("ragged kernel CSV at line " + std::to_string(lineno));
    }
    rows.push_back(std::move(row));
  }
  Matrix K(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return K;
}

KernelMatrix import_kernel(const std::filesystem::path& path) {
  KernelMatrix K;
  if (path.extension() == ".csv") {
    K.values = read_kernel_csv(path);
    K.provenance.config_hash = content_hash("imported:" + path.filename().string());
  } else {
    K = read_kernel_file(path);
  }
  K.provenance.pathway = Pathway::imported;
  K.provenance.timestamp = utc_timestamp();
  flag_indefinite(K);
  if (K.provenance.indefinite) {
    spdlog::info("imported kernel {} is indefinite; used as-is", path.string());
  }
  return K;
}

// ---------------------------------------------------------------- cache

KernelCache::KernelCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path KernelCache::default_dir(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv("QKBENCH_CACHE_DIR"); env != nullptr && *env != '\0') return env;
  return fallback;
}

std::filesystem::path KernelCache::path_for(const Hash128& key) const { return dir_ / (key.hex() + ".qkb"); }

std::optional<KernelMatrix> KernelCache::get(const Hash128& key) const {
  const auto path = path_for(key);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  try {
    auto K = read_kernel_file(path);
    if (!(K.provenance.config_hash == key)) {
      spdlog::warn("cache entry {} carries a different key; ignoring", path.string());
      return std::nullopt;
    }
    return K;
  } catch (const std::exception& e) {
    spdlog::warn("corrupt cache entry {} treated as miss: {}", path.string(), e.what());
    return std::nullopt;
  }
}

void KernelCache::put(const Hash128& key, const KernelMatrix& K) const {
  KernelMatrix stored = K;
  stored.provenance.config_hash = key;
  const auto final_path = path_for(key);
  static std::atomic<unsigned> counter{0};
  const auto tmp = dir_ / (key.hex() + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++));
  write_kernel_file(tmp, stored);
  std::filesystem::rename(tmp, final_path);
}

}  // namespace qkb
