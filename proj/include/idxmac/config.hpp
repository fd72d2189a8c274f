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

// Flat `key = value` run configuration (cost model, vector length, tiling,
// seed) and layer-suite files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "idxmac/cost_model.hpp"
#include "idxmac/errors.hpp"
#include "idxmac/isa.hpp"
#include "idxmac/matrix.hpp"

namespace idxmac {

struct RunConfig {
  CostModel cost;
  unsigned vlen_bits = 512;
  std::size_t L = 16;
  std::size_t unroll = 4;
  std::uint64_t seed = 1;

  VectorConfig vector_config() const { return VectorConfig::make(vlen_bits); }
};

namespace detail {

inline std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    throw FormatError("config: '" + key + "' needs a non-negative integer, got '" + value + "'");
  }
  if (used != value.size()) {
    throw FormatError("config: '" + key + "' needs a non-negative integer, got '" + value + "'");
  }
  return v;
}

}  // namespace detail

/// Reads `key = value` lines on top of `base`. Unknown keys are an error.
inline RunConfig read_config(std::istream& is, RunConfig base = {}) {
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const std::string line = detail::strip(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = detail::strip(line.substr(0, eq));
    const std::string value = detail::strip(line.substr(eq + 1));
    const std::uint64_t v = detail::parse_u64(key, value);
    auto& c = base.cost;
    if (key == "vload_base") c.vload_base = v;
    else if (key == "vstore_base") c.vstore_base = v;
    else if (key == "per_element_mem") c.per_element_mem = v;
    else if (key == "valu") c.valu = v;
    else if (key == "vmv") c.vmv = v;
    else if (key == "scalar_op") c.scalar_op = v;
    else if (key == "setvl") c.setvl = v;
    else if (key == "loop_overhead") c.loop_overhead = v;
    else if (key == "vlen") base.vlen_bits = static_cast<unsigned>(v);
    else if (key == "L") base.L = v;
    else if (key == "unroll") base.unroll = v;
    else if (key == "seed") base.seed = v;
    else throw FormatError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  if (!base.cost.valid()) throw ConstraintError("config: vload_base must be >= valu");
  return base;
}

inline RunConfig load_config(const std::filesystem::path& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_config(in, base);
}

// --- layer suites -----------------------------------------------------------

/// One convolution lowered to C = A * B: A is filters x (in_channels*kh*kw)
/// and B is (in_channels*kh*kw) x output_pixels.
struct Layer {
  std::string name;
  std::size_t a_rows;
  std::size_t a_cols;
  std::size_t b_cols;
  NMConfig nm;
};

struct LayerSuite {
  std::string name;
  std::vector<Layer> layers;
};

/// Suite files: one layer per line, `name a_rows a_cols b_cols n:m`, with `#`
/// comments.
inline LayerSuite read_suite(std::istream& is, std::string name = {}) {
  LayerSuite suite{std::move(name), {}};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    if (detail::strip(raw).empty()) continue;
    std::istringstream ls(raw);
    Layer l{};
    std::string nm_text, extra;
    long long rows = 0, cols = 0, bcols = 0;
    ls >> l.name >> rows >> cols >> bcols >> nm_text;
    if (!ls || (ls >> extra)) {
      throw FormatError("suite line " + std::to_string(line_no) +
                        ": expected 'name a_rows a_cols b_cols n:m'");
    }
    if (rows <= 0 || cols <= 0 || bcols <= 0) {
      throw FormatError("suite line " + std::to_string(line_no) + ": dimensions must be positive");
    }
    l.a_rows = static_cast<std::size_t>(rows);
    l.a_cols = static_cast<std::size_t>(cols);
    l.b_cols = static_cast<std::size_t>(bcols);
    l.nm = NMConfig::parse(nm_text);
    if (l.a_cols % l.nm.m != 0) {
      throw FormatError("suite line " + std::to_string(line_no) + ": a_cols not a multiple of m");
    }
    suite.layers.push_back(std::move(l));
  }
  return suite;
}

inline LayerSuite load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_suite(in, path.stem().string());
}

}  // namespace idxmac
