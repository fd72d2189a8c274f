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

// Kernel generators for row-wise (Gustavson) matrix multiplication on the
// vector engine:
//
//   dense     A dense; per row slice, load B[k,:], scalar-vector MAC, slide.
//   spmm      A in N:M form; per non-zero, load the selected row of B.
//   indexmac  A in N:M form; a tile of L rows of B is preloaded into v0..v(L-1)
//             and every non-zero reads its B row out of the register file
//             with vindexmac.vx.
//
// All kernels use a B-stationary order (k-tile, j-tile, row group) and
// reload/store the C row once per (row, k-tile, j-tile). Rows are processed
// in groups of `unroll`; leftover rows run one at a time.
//
// Generators are templates over an instruction sink (anything with
// `emit(const Instruction&)` and `iteration()`), so a kernel can be collected
// into a Program or executed on the fly.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "idxmac/errors.hpp"
#include "idxmac/isa.hpp"
#include "idxmac/matrix.hpp"

namespace idxmac {

enum class KernelKind { Dense, Spmm, IndexMac };

inline std::string_view kernel_name(KernelKind k) noexcept {
  switch (k) {
    case KernelKind::Dense: return "dense";
    case KernelKind::Spmm: return "spmm";
    case KernelKind::IndexMac: return "indexmac";
  }
  return "?";
}

inline KernelKind parse_kernel(std::string_view s) {
  if (s == "dense") return KernelKind::Dense;
  if (s == "spmm") return KernelKind::Spmm;
  if (s == "indexmac") return KernelKind::IndexMac;
  throw FormatError("unknown kernel '" + std::string(s) + "' (dense|spmm|indexmac)");
}

/// C (rows x cols) = A (rows x inner) * B (inner x cols).
struct KernelShape {
  std::size_t rows = 0;
  std::size_t inner = 0;
  std::size_t cols = 0;

  friend bool operator==(const KernelShape&, const KernelShape&) = default;
};

// --- address map ------------------------------------------------------------

struct Region {
  std::int64_t base = 0;
  std::size_t words = 0;

  std::int64_t end() const noexcept { return base + static_cast<std::int64_t>(words); }
  bool contains(std::int64_t addr) const noexcept { return addr >= base && addr < end(); }
  bool overlaps(std::int64_t lo, std::int64_t hi) const noexcept {
    return words != 0 && lo < end() && hi > base;
  }
};

/// Word-address layout of the operands. For the dense kernel `a_values`
/// holds A row-major and `a_colidx` is empty.
struct AddressMap {
  Region a_values;
  Region a_colidx;
  Region b;
  Region c;
  std::size_t capacity = 0;

  /// Packs the regions back to back starting at `origin`.
  static AddressMap packed(KernelKind kind, KernelShape shape, NMConfig nm,
                           std::int64_t origin = 0) {
    const std::size_t a_words = kind == KernelKind::Dense
                                    ? shape.rows * shape.inner
                                    : shape.rows * (shape.inner / nm.m * nm.n);
    AddressMap map;
    std::int64_t at = origin;
    auto take = [&at](std::size_t words) {
      Region r{at, words};
      at += static_cast<std::int64_t>(words);
      return r;
    };
    map.a_values = take(a_words);
    map.a_colidx = take(kind == KernelKind::Dense ? 0 : a_words);
    map.b = take(shape.inner * shape.cols);
    map.c = take(shape.rows * shape.cols);
    map.capacity = static_cast<std::size_t>(at);
    return map;
  }

  void validate() const {
    const Region* rs[] = {&a_values, &a_colidx, &b, &c};
    for (const Region* r : rs) {
      if (r->base < 0 || static_cast<std::size_t>(r->end()) > capacity) {
        throw ConstraintError("address map region outside memory capacity");
      }
    }
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = i + 1; j < 4; ++j) {
        if (rs[i]->overlaps(rs[j]->base, rs[j]->end())) {
          throw ConstraintError("address map regions overlap");
        }
      }
    }
  }
};

// --- tile plan --------------------------------------------------------------

struct KTile {
  std::size_t start;
  std::size_t length;
  friend bool operator==(const KTile&, const KTile&) = default;
};

struct JTile {
  std::size_t start;
  std::size_t width;
  friend bool operator==(const JTile&, const JTile&) = default;
};

struct TilePlan {
  std::size_t L = 16;
  std::vector<KTile> k_tiles;
  std::vector<JTile> j_tiles;
  std::size_t unroll = 4;
};

/// Vector registers held per unrolled row: C, values, col_idx, scratch.
inline constexpr std::size_t kRegsPerUnrolledRow = 4;

/// Tiles B (a.cols x b.cols) into k-tiles of L rows and j-tiles of at most
/// vl_max columns.
///
/// Constraints: L is a multiple of m; L <= m * vl_max / n, since one vector
/// of A slots can only address that many rows of B; and the B tile plus the
/// per-row registers of the unrolled group fit the 32-entry register file.
inline TilePlan plan_tiles(std::pair<std::size_t, std::size_t> a_shape,
                           std::pair<std::size_t, std::size_t> b_shape, NMConfig nm,
                           const VectorConfig& vcfg, std::size_t L, std::size_t unroll) {
  const auto [a_rows, a_cols] = a_shape;
  const auto [b_rows, b_cols] = b_shape;
  if (a_rows == 0 || a_cols == 0 || b_cols == 0) throw ShapeError("empty operand");
  if (a_cols != b_rows) {
    throw ShapeError("A has " + std::to_string(a_cols) + " columns but B has " +
                     std::to_string(b_rows) + " rows");
  }
  check_block_shape(a_cols, nm);
  if (L == 0 || L % nm.m != 0) {
    throw ConstraintError("L=" + std::to_string(L) + " is not a positive multiple of M=" +
                          std::to_string(nm.m));
  }
  const std::size_t vl = vcfg.vl_max();
  if (L * nm.n > nm.m * vl) {
    throw ConstraintError("L=" + std::to_string(L) + " exceeds M*VL/N = " +
                          std::to_string(nm.m) + "*" + std::to_string(vl) + "/" +
                          std::to_string(nm.n));
  }
  if (unroll == 0) throw ConstraintError("unroll must be positive");
  if (L + kRegsPerUnrolledRow * unroll > kNumRegs) {
    throw ConstraintError("register budget exceeded: L=" + std::to_string(L) + " + " +
                          std::to_string(kRegsPerUnrolledRow) + "*unroll=" +
                          std::to_string(kRegsPerUnrolledRow * unroll) + " > " +
                          std::to_string(kNumRegs) + " vector registers");
  }
  TilePlan plan;
  plan.L = L;
  plan.unroll = unroll;
  for (std::size_t k = 0; k < a_cols; k += L) plan.k_tiles.push_back({k, std::min(L, a_cols - k)});
  for (std::size_t j = 0; j < b_cols; j += vl) plan.j_tiles.push_back({j, std::min<std::size_t>(vl, b_cols - j)});
  return plan;
}

// --- register allocation ----------------------------------------------------

/// v0..v(L-1) B tile, then C rows, values rows, col_idx rows and scratch, one
/// block of `unroll` registers each. Scalars: x1 index bias, then per-row
/// B-row/index registers and per-row multiplier registers.
struct RegisterLayout {
  std::size_t L;
  std::size_t unroll;

  std::uint8_t c(std::size_t r) const { return reg(L + r); }
  std::uint8_t values(std::size_t r) const { return reg(L + unroll + r); }
  std::uint8_t colidx(std::size_t r) const { return reg(L + 2 * unroll + r); }
  std::uint8_t scratch(std::size_t r) const { return reg(L + 3 * unroll + r); }

  static constexpr std::uint8_t bias = 1;
  std::uint8_t index_x(std::size_t r) const { return reg(2 + r); }
  std::uint8_t mult_x(std::size_t r) const { return reg(2 + unroll + r); }

private:
  static std::uint8_t reg(std::size_t r) { return static_cast<std::uint8_t>(r); }
};

struct RowGroup {
  std::size_t first;
  std::size_t size;
};

inline std::vector<RowGroup> row_groups(std::size_t rows, std::size_t unroll) {
  std::vector<RowGroup> out;
  std::size_t i = 0;
  for (; i + unroll <= rows; i += unroll) out.push_back({i, unroll});
  for (; i < rows; ++i) out.push_back({i, 1});
  return out;
}

namespace detail {

inline std::int64_t addr(const Region& r, std::size_t word) {
  return r.base + static_cast<std::int64_t>(word);
}

inline void check_plan(const KernelShape& shape, const TilePlan& plan, const VectorConfig& vcfg) {
  std::size_t k = 0;
  for (const auto& t : plan.k_tiles) {
    if (t.start != k || t.length == 0 || t.length > plan.L) throw ConstraintError("k-tiles do not cover A columns");
    k += t.length;
  }
  if (k != shape.inner) throw ConstraintError("k-tiles do not cover A columns");
  std::size_t j = 0;
  for (const auto& t : plan.j_tiles) {
    if (t.start != j || t.width == 0 || t.width > vcfg.vl_max()) throw ConstraintError("j-tiles do not cover B columns");
    j += t.width;
  }
  if (j != shape.cols) throw ConstraintError("j-tiles do not cover B columns");
  if (plan.unroll == 0 || plan.L + kRegsPerUnrolledRow * plan.unroll > kNumRegs) {
    throw ConstraintError("register budget exceeded");
  }
}

/// Slots of one A row that fall in k-tile `t`.
struct SlotRange {
  std::size_t first;
  std::size_t count;
};

inline SlotRange slots_of(const KTile& t, NMConfig nm) {
  return {t.start / nm.m * nm.n, t.length / nm.m * nm.n};
}

}  // namespace detail

// --- emitters ---------------------------------------------------------------

template <typename Sink>
void emit_dense(const KernelShape& shape, const AddressMap& map, const VectorConfig& vcfg,
                const TilePlan& plan, Sink& sink) {
  detail::check_plan(shape, plan, vcfg);
  const RegisterLayout regs{plan.L, plan.unroll};
  const auto groups = row_groups(shape.rows, plan.unroll);
  const std::size_t K = shape.inner, J = shape.cols;
  for (const auto& kt : plan.k_tiles) {
    if (kt.length > vcfg.vl_max()) throw ConstraintError("dense k-tile longer than vl_max");
    for (const auto& jt : plan.j_tiles) {
      sink.iteration();
      for (const auto& g : groups) {
        sink.iteration();
        sink.emit(SetVL{static_cast<std::uint32_t>(kt.length)});
        for (std::size_t r = 0; r < g.size; ++r) {
          sink.emit(VLoad{regs.values(r), 0,
                          detail::addr(map.a_values, (g.first + r) * K + kt.start), 0});
        }
        sink.emit(SetVL{static_cast<std::uint32_t>(jt.width)});
        for (std::size_t r = 0; r < g.size; ++r) {
          sink.emit(VLoad{regs.c(r), 0, detail::addr(map.c, (g.first + r) * J + jt.start), 0});
        }
        for (std::size_t e = 0; e < kt.length; ++e) {
          sink.iteration();
          sink.emit(VLoad{regs.scratch(0), 0,
                          detail::addr(map.b, (kt.start + e) * J + jt.start), 0});
          for (std::size_t r = 0; r < g.size; ++r) {
            sink.emit(VMvXS{regs.mult_x(r), regs.values(r)});
            sink.emit(VMaccVx{regs.c(r), regs.mult_x(r), regs.scratch(0)});
            sink.emit(VSlide1Down{regs.values(r), regs.values(r)});
          }
        }
        for (std::size_t r = 0; r < g.size; ++r) {
          sink.emit(VStore{regs.c(r), 0, detail::addr(map.c, (g.first + r) * J + jt.start), 0});
        }
      }
    }
  }
}

namespace detail {

/// Row-group prologue shared by both sparse kernels: load the group's
/// values/col_idx slots for this k-tile, bias the indices by x1, then load
/// the C rows at the j-tile width.
template <typename Sink>
void emit_sparse_row_prologue(const KernelShape& shape, const AddressMap& map,
                              const RegisterLayout& regs, std::size_t slots_per_row,
                              SlotRange slots, const JTile& jt, const RowGroup& g, Sink& sink) {
  sink.emit(SetVL{static_cast<std::uint32_t>(slots.count)});
  for (std::size_t r = 0; r < g.size; ++r) {
    const std::size_t word = (g.first + r) * slots_per_row + slots.first;
    sink.emit(VLoad{regs.values(r), 0, addr(map.a_values, word), 0});
    sink.emit(VLoad{regs.colidx(r), 0, addr(map.a_colidx, word), 0});
    sink.emit(VAddVx{regs.colidx(r), regs.colidx(r), RegisterLayout::bias});
  }
  sink.emit(SetVL{static_cast<std::uint32_t>(jt.width)});
  for (std::size_t r = 0; r < g.size; ++r) {
    sink.emit(VLoad{regs.c(r), 0, addr(map.c, (g.first + r) * shape.cols + jt.start), 0});
  }
}

template <typename Sink>
void emit_c_stores(const KernelShape& shape, const AddressMap& map, const RegisterLayout& regs,
                   const JTile& jt, const RowGroup& g, Sink& sink) {
  for (std::size_t r = 0; r < g.size; ++r) {
    sink.emit(VStore{regs.c(r), 0, addr(map.c, (g.first + r) * shape.cols + jt.start), 0});
  }
}

}  // namespace detail

/// Row-wise sparse-dense baseline. Indices are biased to tile-local B rows
/// (x1 = -k_start) and each non-zero issues:
///   vmv.x.s row; vle32.v B[row]; vmv.x.s value; vmacc.vx; 2x vslide1down.
template <typename Sink>
void emit_spmm_baseline(const KernelShape& shape, NMConfig nm, const AddressMap& map,
                        const VectorConfig& vcfg, const TilePlan& plan, Sink& sink) {
  detail::check_plan(shape, plan, vcfg);
  const RegisterLayout regs{plan.L, plan.unroll};
  const auto groups = row_groups(shape.rows, plan.unroll);
  const std::size_t spr = shape.inner / nm.m * nm.n;
  const std::size_t J = shape.cols;
  for (const auto& kt : plan.k_tiles) {
    const auto slots = detail::slots_of(kt, nm);
    if (slots.count > vcfg.vl_max()) throw ConstraintError("k-tile slots exceed vl_max");
    sink.emit(SLoadImm{RegisterLayout::bias, -static_cast<std::int64_t>(kt.start)});
    for (const auto& jt : plan.j_tiles) {
      sink.iteration();
      const std::int64_t b_tile = detail::addr(map.b, kt.start * J + jt.start);
      for (const auto& g : groups) {
        sink.iteration();
        detail::emit_sparse_row_prologue(shape, map, regs, spr, slots, jt, g, sink);
        for (std::size_t s = 0; s < slots.count; ++s) {
          sink.iteration();
          for (std::size_t r = 0; r < g.size; ++r) {
            sink.emit(VMvXS{regs.index_x(r), regs.colidx(r)});
            sink.emit(VLoad{regs.scratch(r), regs.index_x(r), b_tile, static_cast<std::int64_t>(J)});
            sink.emit(VMvXS{regs.mult_x(r), regs.values(r)});
            sink.emit(VMaccVx{regs.c(r), regs.mult_x(r), regs.scratch(r)});
            sink.emit(VSlide1Down{regs.values(r), regs.values(r)});
            sink.emit(VSlide1Down{regs.colidx(r), regs.colidx(r)});
          }
        }
        detail::emit_c_stores(shape, map, regs, jt, g, sink);
      }
    }
  }
}

/// Sparse-dense kernel with B-tile preloading. Indices are biased to register
/// numbers (x1 = 0 - k_start, the tile lives in v0..) and each non-zero
/// issues:
///   vmv.x.s reg; vindexmac.vx; 2x vslide1down.
template <typename Sink>
void emit_spmm_indexmac(const KernelShape& shape, NMConfig nm, const AddressMap& map,
                        const VectorConfig& vcfg, const TilePlan& plan, Sink& sink) {
  detail::check_plan(shape, plan, vcfg);
  const RegisterLayout regs{plan.L, plan.unroll};
  const auto groups = row_groups(shape.rows, plan.unroll);
  const std::size_t spr = shape.inner / nm.m * nm.n;
  const std::size_t J = shape.cols;
  constexpr std::int64_t tile_base_reg = 0;
  for (const auto& kt : plan.k_tiles) {
    const auto slots = detail::slots_of(kt, nm);
    if (slots.count > vcfg.vl_max()) throw ConstraintError("k-tile slots exceed vl_max");
    sink.emit(SLoadImm{RegisterLayout::bias, tile_base_reg - static_cast<std::int64_t>(kt.start)});
    for (const auto& jt : plan.j_tiles) {
      sink.iteration();
      sink.emit(SetVL{static_cast<std::uint32_t>(jt.width)});
      for (std::size_t l = 0; l < kt.length; ++l) {
        sink.iteration();
        sink.emit(VLoad{static_cast<std::uint8_t>(tile_base_reg + static_cast<std::int64_t>(l)), 0,
                        detail::addr(map.b, (kt.start + l) * J + jt.start), 0});
      }
      for (const auto& g : groups) {
        sink.iteration();
        detail::emit_sparse_row_prologue(shape, map, regs, spr, slots, jt, g, sink);
        for (std::size_t s = 0; s < slots.count; ++s) {
          sink.iteration();
          for (std::size_t r = 0; r < g.size; ++r) {
            sink.emit(VMvXS{regs.index_x(r), regs.colidx(r)});
            sink.emit(VIndexMac{regs.c(r), regs.values(r), regs.index_x(r)});
            sink.emit(VSlide1Down{regs.values(r), regs.values(r)});
            sink.emit(VSlide1Down{regs.colidx(r), regs.colidx(r)});
          }
        }
        detail::emit_c_stores(shape, map, regs, jt, g, sink);
      }
    }
  }
}

// --- generators with data checks -------------------------------------------

namespace detail {

/// Every stored index of every row must land inside the k-tile its slot
/// belongs to; for the indexmac kernel it must also be a legal tile register.
inline void check_indices(const StructuredSparseMatrix& a, const TilePlan& plan) {
  for (const auto& kt : plan.k_tiles) {
    if (kt.start % a.nm().m != 0 || kt.length % a.nm().m != 0) {
      throw ConstraintError("k-tile [" + std::to_string(kt.start) + ", " +
                            std::to_string(kt.start + kt.length) + ") splits an M-block");
    }
  }
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto idx = a.col_idx_row(i);
    for (const auto& kt : plan.k_tiles) {
      const auto slots = slots_of(kt, a.nm());
      for (std::size_t s = slots.first; s < slots.first + slots.count; ++s) {
        if (idx[s] < kt.start || idx[s] >= kt.start + kt.length) {
          throw ConstraintError("row " + std::to_string(i) + ": column index " +
                                std::to_string(idx[s]) + " outside k-tile [" +
                                std::to_string(kt.start) + ", " +
                                std::to_string(kt.start + kt.length) + ")");
        }
      }
    }
  }
}

inline KernelShape shape_of(const StructuredSparseMatrix& a, std::size_t b_cols) {
  return {a.rows(), a.cols(), b_cols};
}

}  // namespace detail

inline Program gen_dense(const KernelShape& shape, const AddressMap& map,
                         const VectorConfig& vcfg, const TilePlan& plan) {
  Program p;
  emit_dense(shape, map, vcfg, plan, p);
  return p;
}

inline Program gen_spmm_baseline(const StructuredSparseMatrix& a, std::size_t b_cols,
                                 const AddressMap& map, const VectorConfig& vcfg,
                                 const TilePlan& plan) {
  detail::check_indices(a, plan);
  Program p;
  emit_spmm_baseline(detail::shape_of(a, b_cols), a.nm(), map, vcfg, plan, p);
  return p;
}

inline Program gen_spmm_indexmac(const StructuredSparseMatrix& a, std::size_t b_cols,
                                 const AddressMap& map, const VectorConfig& vcfg,
                                 const TilePlan& plan) {
  detail::check_indices(a, plan);
  if (plan.L > kNumRegs) throw ConstraintError("B tile larger than the register file");
  Program p;
  emit_spmm_indexmac(detail::shape_of(a, b_cols), a.nm(), map, vcfg, plan, p);
  return p;
}

// --- memory images ----------------------------------------------------------

/// Fresh machine with the sparse operands laid out per `map` and C zeroed.
inline MachineState load_operands(const VectorConfig& vcfg, const AddressMap& map,
                                  const StructuredSparseMatrix& a, const DenseMatrix& b) {
  map.validate();
  MachineState st(vcfg, map.capacity);
  auto mem = st.memory();
  for (std::size_t k = 0; k < a.values().size(); ++k) {
    mem[static_cast<std::size_t>(map.a_values.base) + k] = as_word(a.values()[k]);
    mem[static_cast<std::size_t>(map.a_colidx.base) + k] = a.col_idx()[k];
  }
  for (std::size_t k = 0; k < b.data().size(); ++k) {
    mem[static_cast<std::size_t>(map.b.base) + k] = as_word(b.data()[k]);
  }
  return st;
}

inline MachineState load_operands(const VectorConfig& vcfg, const AddressMap& map,
                                  const DenseMatrix& a, const DenseMatrix& b) {
  map.validate();
  MachineState st(vcfg, map.capacity);
  auto mem = st.memory();
  for (std::size_t k = 0; k < a.data().size(); ++k) {
    mem[static_cast<std::size_t>(map.a_values.base) + k] = as_word(a.data()[k]);
  }
  for (std::size_t k = 0; k < b.data().size(); ++k) {
    mem[static_cast<std::size_t>(map.b.base) + k] = as_word(b.data()[k]);
  }
  return st;
}

inline DenseMatrix read_c(const MachineState& st, const AddressMap& map, std::size_t rows,
                          std::size_t cols) {
  std::vector<float> data(rows * cols);
  auto mem = st.memory();
  for (std::size_t k = 0; k < data.size(); ++k) {
    data[k] = as_float(mem[static_cast<std::size_t>(map.c.base) + k]);
  }
  return {rows, cols, std::move(data)};
}

// --- analytic counts --------------------------------------------------------

struct PredictedCounts {
  ExecStats stats;
  std::uint64_t loop_iterations = 0;
  /// Loads of B rows into the stationary tile (indexmac prologues).
  std::uint64_t b_preload_loads = 0;
  /// Loads of B rows issued inside the multiply-accumulate loop.
  std::uint64_t b_inner_loads = 0;
};

/// Closed-form statistics of a generated kernel. With T k-tiles, Jn j-tiles
/// (total width J), K inner dimension, R rows in G row groups and S stored
/// slots per row (S = K for the dense kernel):
///
///   spmm      vle32 = Jn*R*(3T + S)     vse32 = Jn*R*T   setvl = 2*G*T*Jn
///             vmv.x.s = 2*Jn*R*S   vmacc = Jn*R*S   slides = 2*Jn*R*S
///             loaded elements = R*(2*S*Jn + T*J + S*J)
///   indexmac  vle32 = Jn*(K + 3*R*T)    vse32 = Jn*R*T   setvl = T*Jn*(1 + 2G)
///             vmv.x.s = Jn*R*S   vindexmac = Jn*R*S   slides = 2*Jn*R*S
///             loaded elements = K*J + R*(2*S*Jn + T*J)
///   dense     vle32 = Jn*(2*R*T + G*K)  vse32 = Jn*R*T   setvl = 2*G*T*Jn
///             vmv.x.s = vmacc = slides = Jn*R*K
///             loaded elements = R*K*Jn + R*T*J + G*K*J
///
/// Sparse kernels add T li and Jn*R*T vadd.vx; stored elements are R*T*J.
/// Loop iterations: T*Jn + G*Jn*(T + S), plus Jn*K preload iterations for
/// indexmac. Per inner non-zero that is 6 instructions (1 load) for spmm and 4
/// (0 loads) for indexmac.
inline PredictedCounts analytic_counts(KernelKind kind, const KernelShape& shape, NMConfig nm,
                                       const TilePlan& plan, const CostModel& cost = {}) {
  using u64 = std::uint64_t;
  const u64 T = plan.k_tiles.size();
  const u64 Jn = plan.j_tiles.size();
  u64 J = 0;
  for (const auto& jt : plan.j_tiles) J += jt.width;
  const u64 K = shape.inner;
  const u64 R = shape.rows;
  const u64 u = plan.unroll;
  const u64 G = R / u + R % u;
  const u64 S = kind == KernelKind::Dense ? K : K / nm.m * nm.n;

  PredictedCounts out;
  auto& st = out.stats;
  auto set = [&st](Opcode op, u64 v) { st.issued[static_cast<std::size_t>(op)] = v; };

  switch (kind) {
    case KernelKind::Dense:
      set(Opcode::SetVL, 2 * G * T * Jn);
      set(Opcode::VLoad, Jn * (2 * R * T + G * K));
      set(Opcode::VStore, Jn * R * T);
      set(Opcode::VMvXS, Jn * R * K);
      set(Opcode::VMaccVx, Jn * R * K);
      set(Opcode::VSlide1Down, Jn * R * K);
      st.loaded_elements = R * K * Jn + R * T * J + G * K * J;
      out.loop_iterations = T * Jn + G * Jn * (T + S);
      out.b_inner_loads = Jn * G * K;
      break;
    case KernelKind::Spmm:
      set(Opcode::SetVL, 2 * G * T * Jn);
      set(Opcode::VLoad, Jn * R * (3 * T + S));
      set(Opcode::VStore, Jn * R * T);
      set(Opcode::VAddVx, Jn * R * T);
      set(Opcode::VMvXS, 2 * Jn * R * S);
      set(Opcode::VMaccVx, Jn * R * S);
      set(Opcode::VSlide1Down, 2 * Jn * R * S);
      set(Opcode::SLoadImm, T);
      st.loaded_elements = R * (2 * S * Jn + T * J + S * J);
      out.loop_iterations = T * Jn + G * Jn * (T + S);
      out.b_inner_loads = Jn * R * S;
      break;
    case KernelKind::IndexMac:
      set(Opcode::SetVL, T * Jn * (1 + 2 * G));
      set(Opcode::VLoad, Jn * (K + 3 * R * T));
      set(Opcode::VStore, Jn * R * T);
      set(Opcode::VAddVx, Jn * R * T);
      set(Opcode::VMvXS, Jn * R * S);
      set(Opcode::VIndexMac, Jn * R * S);
      set(Opcode::VSlide1Down, 2 * Jn * R * S);
      set(Opcode::SLoadImm, T);
      st.loaded_elements = K * J + R * (2 * S * Jn + T * J);
      out.loop_iterations = T * Jn + Jn * K + G * Jn * (T + S);
      out.b_preload_loads = Jn * K;
      break;
  }
  st.stored_elements = R * T * J;
  st.vector_mem_loads = st.count(Opcode::VLoad);
  st.vector_mem_stores = st.count(Opcode::VStore);
  st.vrf_indirect_reads = st.count(Opcode::VIndexMac);
  st.scalar_ops = st.count(Opcode::SLoadImm) + st.count(Opcode::SAdd);
  st.cycles = cost.setvl * st.count(Opcode::SetVL) +
              cost.vload_base * st.vector_mem_loads +
              cost.vstore_base * st.vector_mem_stores +
              cost.per_element_mem * (st.loaded_elements + st.stored_elements) +
              cost.valu * (st.count(Opcode::VMaccVx) + st.count(Opcode::VAddVx) +
                           st.count(Opcode::VSlide1Down) + st.count(Opcode::VIndexMac)) +
              cost.vmv * st.count(Opcode::VMvXS) + cost.scalar_op * st.scalar_ops;
  return out;
}

}  // namespace idxmac
