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

// ".mtxt" text matrix files.
//
//   dense <rows> <cols>
//   <row 0 values>
//   ...
//
//   nm <rows> <cols> <n> <m>
//   <row 0 values>
//   <row 0 col_idx>
//   ...
//
// Floats are written in shortest round-trip form, so save/load is exact.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "idxmac/matrix.hpp"

namespace idxmac {

using AnyMatrix = std::variant<DenseMatrix, StructuredSparseMatrix>;

namespace detail {

inline void put_float(std::ostream& os, float v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, res.ptr - buf);
}

template <typename T>
std::vector<T> read_row(std::istream& is, std::size_t count, std::size_t line_no) {
  std::string line;
  if (!std::getline(is, line)) {
    throw FormatError("mtxt: unexpected end of file at line " + std::to_string(line_no));
  }
  std::vector<T> out;
  out.reserve(count);
  const char* p = line.data();
  const char* end = p + line.size();
  while (true) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p == end) break;
    T v{};
    auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc{}) {
      throw FormatError("mtxt: bad number on line " + std::to_string(line_no));
    }
    out.push_back(v);
    p = res.ptr;
  }
  if (out.size() != count) {
    throw FormatError("mtxt: line " + std::to_string(line_no) + " has " +
                      std::to_string(out.size()) + " entries, expected " +
                      std::to_string(count));
  }
  return out;
}

}  // namespace detail

inline void write_mtxt(std::ostream& os, const DenseMatrix& m) {
  os << "dense " << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ' ';
      detail::put_float(os, row[c]);
    }
    os << '\n';
  }
}

inline void write_mtxt(std::ostream& os, const StructuredSparseMatrix& m) {
  os << "nm " << m.rows() << ' ' << m.cols() << ' ' << m.nm().n << ' ' << m.nm().m
     << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto vals = m.values_row(r);
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (k) os << ' ';
      detail::put_float(os, vals[k]);
    }
    os << '\n';
    auto idx = m.col_idx_row(r);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (k) os << ' ';
      os << idx[k];
    }
    os << '\n';
  }
}

inline AnyMatrix read_mtxt(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw FormatError("mtxt: empty input");
  std::istringstream hs(header);
  std::string kind;
  std::size_t rows = 0, cols = 0;
  hs >> kind >> rows >> cols;
  if (!hs || rows == 0 || cols == 0) throw FormatError("mtxt: bad header '" + header + "'");
  if (kind == "dense") {
    std::vector<float> data;
    data.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      auto row = detail::read_row<float>(is, cols, r + 2);
      data.insert(data.end(), row.begin(), row.end());
    }
    return DenseMatrix(rows, cols, std::move(data));
  }
  if (kind == "nm") {
    std::size_t n = 0, m = 0;
    hs >> n >> m;
    if (!hs) throw FormatError("mtxt: nm header needs <n> <m>");
    NMConfig nm;
    try {
      nm = NMConfig::make(n, m);
    } catch (const ShapeError& e) {
      throw FormatError(std::string("mtxt: ") + e.what());
    }
    if (cols % m != 0) throw FormatError("mtxt: cols not a multiple of m");
    const std::size_t slots = cols / m * n;
    std::vector<float> values;
    std::vector<std::uint32_t> col_idx;
    values.reserve(rows * slots);
    col_idx.reserve(rows * slots);
    for (std::size_t r = 0; r < rows; ++r) {
      auto v = detail::read_row<float>(is, slots, 2 * r + 2);
      auto c = detail::read_row<std::uint32_t>(is, slots, 2 * r + 3);
      values.insert(values.end(), v.begin(), v.end());
      col_idx.insert(col_idx.end(), c.begin(), c.end());
    }
    return StructuredSparseMatrix(rows, cols, nm, std::move(values), std::move(col_idx));
  }
  throw FormatError("mtxt: unknown matrix kind '" + kind + "'");
}

inline AnyMatrix load_mtxt(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_mtxt(in);
}

template <typename Matrix>
void save_mtxt(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_mtxt(out, m);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace idxmac
