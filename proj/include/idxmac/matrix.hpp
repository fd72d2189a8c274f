// Copyright 2026 The idxmac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "idxmac/errors.hpp"

namespace idxmac {

/// N:M structured sparsity: at most `n` non-zeros in each block of `m`
/// consecutive row elements.
struct NMConfig {
  std::size_t n = 1;
  std::size_t m = 1;

  static NMConfig make(std::size_t n, std::size_t m) {
    if (n == 0 || m == 0 || n > m) {
      throw ShapeError("invalid N:M config " + std::to_string(n) + ":" +
                       std::to_string(m) + " (need 1 <= n <= m)");
    }
    return NMConfig{n, m};
  }

  /// Parses "n:m", e.g. "2:4".
  static NMConfig parse(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) {
      throw FormatError("expected N:M, got '" + std::string(text) + "'");
    }
    try {
      auto n = std::stoul(std::string(text.substr(0, colon)));
      auto m = std::stoul(std::string(text.substr(colon + 1)));
      return make(n, m);
    } catch (const std::logic_error&) {
      throw FormatError("expected N:M, got '" + std::string(text) + "'");
    }
  }

  std::string str() const { return std::to_string(n) + ":" + std::to_string(m); }

  friend bool operator==(const NMConfig&, const NMConfig&) = default;
};

/// Row-major matrix of 32-bit floats.
class DenseMatrix {
public:
  DenseMatrix() = default;

  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0f) {
    check_dims();
  }

  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<float> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    check_dims();
    if (data_.size() != rows_ * cols_) {
      throw ShapeError("dense data length " + std::to_string(data_.size()) +
                       " != " + std::to_string(rows_) + "x" +
                       std::to_string(cols_));
    }
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0f;
    return out;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  float& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  float operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<float> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const float> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<const float> data() const noexcept { return data_; }

  /// Element-wise value equality (so +0 == -0).
  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

private:
  void check_dims() const {
    if (rows_ == 0 || cols_ == 0) throw ShapeError("matrix dimensions must be positive");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
};

/// N:M encoding of a matrix: each row holds cols/m blocks of exactly n
/// (value, global column) slots. Blocks with fewer than n non-zeros are padded
/// with value 0 and the block's first column.
class StructuredSparseMatrix {
public:
  StructuredSparseMatrix(std::size_t rows, std::size_t cols, NMConfig nm,
                         std::vector<float> values, std::vector<std::uint32_t> col_idx)
      : rows_(rows), cols_(cols), nm_(nm), values_(std::move(values)),
        col_idx_(std::move(col_idx)) {
    validate();
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  NMConfig nm() const noexcept { return nm_; }
  std::size_t blocks_per_row() const noexcept { return cols_ / nm_.m; }
  std::size_t slots_per_row() const noexcept { return blocks_per_row() * nm_.n; }

  std::span<const float> values() const noexcept { return values_; }
  std::span<const std::uint32_t> col_idx() const noexcept { return col_idx_; }

  std::span<const float> values_row(std::size_t r) const {
    return {values_.data() + r * slots_per_row(), slots_per_row()};
  }
  std::span<const std::uint32_t> col_idx_row(std::size_t r) const {
    return {col_idx_.data() + r * slots_per_row(), slots_per_row()};
  }

  friend bool operator==(const StructuredSparseMatrix& a,
                         const StructuredSparseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.nm_ == b.nm_ &&
           a.values_ == b.values_ && a.col_idx_ == b.col_idx_;
  }

private:
  void validate() const {
    if (rows_ == 0 || cols_ == 0) throw ShapeError("matrix dimensions must be positive");
    if (cols_ % nm_.m != 0) {
      throw ShapeError("cols " + std::to_string(cols_) + " not a multiple of m=" +
                       std::to_string(nm_.m));
    }
    const std::size_t expect = rows_ * slots_per_row();
    if (values_.size() != expect || col_idx_.size() != expect) {
      throw FormatError("values/col_idx length must be " + std::to_string(expect));
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t b = 0; b < blocks_per_row(); ++b) {
        const std::size_t lo = b * nm_.m;
        const std::size_t base = r * slots_per_row() + b * nm_.n;
        std::int64_t last = -1;
        for (std::size_t s = 0; s < nm_.n; ++s) {
          const std::uint32_t idx = col_idx_[base + s];
          if (idx < lo || idx >= lo + nm_.m) {
            throw FormatError("row " + std::to_string(r) + " block " +
                              std::to_string(b) + ": index " + std::to_string(idx) +
                              " outside [" + std::to_string(lo) + ", " +
                              std::to_string(lo + nm_.m) + ")");
          }
          if (values_[base + s] == 0.0f) continue;  // padding
          if (static_cast<std::int64_t>(idx) <= last) {
            throw FormatError("row " + std::to_string(r) + " block " +
                              std::to_string(b) +
                              ": duplicate or unordered index " + std::to_string(idx));
          }
          last = idx;
        }
      }
    }
  }

  std::size_t rows_;
  std::size_t cols_;
  NMConfig nm_;
  std::vector<float> values_;
  std::vector<std::uint32_t> col_idx_;
};

/// C = A * B with each C[i][j] accumulated over ascending k, one rounding per
/// multiply and per add.
inline DenseMatrix dense_matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("dense_matmul: " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " * " + std::to_string(b.rows()) +
                     "x" + std::to_string(b.cols()));
  }
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const float aik = a(i, k);
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) {
        const float prod = aik * brow[j];
        out[j] = out[j] + prod;
      }
    }
  }
  return c;
}

inline void check_block_shape(std::size_t cols, NMConfig nm) {
  if (cols % nm.m != 0) {
    throw ShapeError("cols " + std::to_string(cols) + " not a multiple of m=" +
                     std::to_string(nm.m));
  }
}

/// Keeps the n largest-magnitude elements of every m-block; ties go to the
/// lower column.
inline DenseMatrix prune_nm(const DenseMatrix& x, NMConfig nm) {
  check_block_shape(x.cols(), nm);
  DenseMatrix out(x.rows(), x.cols());
  std::vector<std::size_t> order(nm.m);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t lo = 0; lo < x.cols(); lo += nm.m) {
      std::iota(order.begin(), order.end(), lo);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::fabs(x(r, a)) > std::fabs(x(r, b));
      });
      for (std::size_t s = 0; s < nm.n; ++s) out(r, order[s]) = x(r, order[s]);
    }
  }
  return out;
}

inline StructuredSparseMatrix encode_nm(const DenseMatrix& x, NMConfig nm) {
  check_block_shape(x.cols(), nm);
  const std::size_t slots = x.cols() / nm.m * nm.n;
  std::vector<float> values(x.rows() * slots, 0.0f);
  std::vector<std::uint32_t> col_idx(x.rows() * slots, 0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t b = 0; b < x.cols() / nm.m; ++b) {
      const std::size_t lo = b * nm.m;
      const std::size_t base = r * slots + b * nm.n;
      std::size_t used = 0;
      for (std::size_t c = lo; c < lo + nm.m; ++c) {
        if (x(r, c) == 0.0f) continue;
        if (used == nm.n) {
          throw FormatError("row " + std::to_string(r) + " block " + std::to_string(b) +
                            " has more than " + std::to_string(nm.n) + " non-zeros");
        }
        values[base + used] = x(r, c);
        col_idx[base + used] = static_cast<std::uint32_t>(c);
        ++used;
      }
      for (; used < nm.n; ++used) col_idx[base + used] = static_cast<std::uint32_t>(lo);
    }
  }
  return {x.rows(), x.cols(), nm, std::move(values), std::move(col_idx)};
}

inline DenseMatrix decode_nm(const StructuredSparseMatrix& s) {
  DenseMatrix out(s.rows(), s.cols());
  for (std::size_t r = 0; r < s.rows(); ++r) {
    auto vals = s.values_row(r);
    auto idx = s.col_idx_row(r);
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (vals[k] != 0.0f) out(r, idx[k]) = vals[k];
    }
  }
  return out;
}

namespace detail {
inline float nonzero_sample(std::mt19937_64& rng) {
  std::uniform_real_distribution<float> mag(0.125f, 1.0f);
  const float v = mag(rng);
  return (rng() & 1u) ? -v : v;
}
}  // namespace detail

/// Random N:M matrix with exactly n non-zeros per block, magnitudes in
/// [0.125, 1). Deterministic for a given seed.
inline StructuredSparseMatrix random_nm(std::size_t rows, std::size_t cols, NMConfig nm,
                                        std::uint64_t seed) {
  if (rows == 0 || cols == 0) throw ShapeError("matrix dimensions must be positive");
  check_block_shape(cols, nm);
  std::mt19937_64 rng(seed);
  const std::size_t slots = cols / nm.m * nm.n;
  std::vector<float> values(rows * slots);
  std::vector<std::uint32_t> col_idx(rows * slots);
  std::vector<std::uint32_t> lanes(nm.m);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t b = 0; b < cols / nm.m; ++b) {
      std::iota(lanes.begin(), lanes.end(), static_cast<std::uint32_t>(b * nm.m));
      // partial Fisher-Yates, then restore ascending order
      for (std::size_t s = 0; s < nm.n; ++s) {
        std::uniform_int_distribution<std::size_t> pick(s, nm.m - 1);
        std::swap(lanes[s], lanes[pick(rng)]);
      }
      std::sort(lanes.begin(), lanes.begin() + static_cast<std::ptrdiff_t>(nm.n));
      const std::size_t base = r * slots + b * nm.n;
      for (std::size_t s = 0; s < nm.n; ++s) {
        values[base + s] = detail::nonzero_sample(rng);
        col_idx[base + s] = lanes[s];
      }
    }
  }
  return {rows, cols, nm, std::move(values), std::move(col_idx)};
}

/// Random dense matrix, elements uniform in [-1, 1).
inline DenseMatrix random_dense(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  std::vector<float> data(rows * cols);
  for (auto& v : data) v = dist(rng);
  return {rows, cols, std::move(data)};
}

}  // namespace idxmac
