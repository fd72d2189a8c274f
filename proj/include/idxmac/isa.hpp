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

// Interpreter for the vector-engine subset used by the row-wise matmul
// kernels, plus the custom indexed multiply-accumulate.
//
// Vector lanes and memory words are raw 32-bit values. Floating-point ops
// (VMaccVx, VIndexMac) reinterpret them as IEEE floats; VAddVx is an integer
// add, which is how column indices are biased. Memory is word addressed.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "idxmac/cost_model.hpp"
#include "idxmac/errors.hpp"

namespace idxmac {

inline constexpr unsigned kNumRegs = 32;

struct VectorConfig {
  unsigned vlen_bits = 512;
  unsigned sew_bits = 32;

  unsigned vl_max() const noexcept { return vlen_bits / sew_bits; }

  static VectorConfig make(unsigned vlen_bits, unsigned sew_bits = 32) {
    if (sew_bits != 32) throw ConstraintError("only 32-bit elements are supported");
    if (vlen_bits == 0 || vlen_bits % sew_bits != 0) {
      throw ConstraintError("vlen_bits must be a positive multiple of sew_bits");
    }
    return VectorConfig{vlen_bits, sew_bits};
  }

  friend bool operator==(const VectorConfig&, const VectorConfig&) = default;
};

// --- instructions -----------------------------------------------------------

struct SetVL {
  std::uint32_t vl;
  friend bool operator==(const SetVL&, const SetVL&) = default;
};

/// vd[0..vl) = mem[offset + x[rs]*stride ...]. With rs = x0 the address is
/// just `offset`.
struct VLoad {
  std::uint8_t vd;
  std::uint8_t rs;
  std::int64_t offset;
  std::int64_t stride;
  friend bool operator==(const VLoad&, const VLoad&) = default;
};

struct VStore {
  std::uint8_t vs;
  std::uint8_t rs;
  std::int64_t offset;
  std::int64_t stride;
  friend bool operator==(const VStore&, const VStore&) = default;
};

/// vd[i] += f32(x[rs]) * vs2[i]
struct VMaccVx {
  std::uint8_t vd;
  std::uint8_t rs;
  std::uint8_t vs2;
  friend bool operator==(const VMaccVx&, const VMaccVx&) = default;
};

/// vd[i] = vs[i] + x[rs] (32-bit integer add)
struct VAddVx {
  std::uint8_t vd;
  std::uint8_t vs;
  std::uint8_t rs;
  friend bool operator==(const VAddVx&, const VAddVx&) = default;
};

/// vd[i] = vs[i+1] over the whole register, zero into the top lane.
struct VSlide1Down {
  std::uint8_t vd;
  std::uint8_t vs;
  friend bool operator==(const VSlide1Down&, const VSlide1Down&) = default;
};

/// x[rd] = sext(vs[0])
struct VMvXS {
  std::uint8_t rd;
  std::uint8_t vs;
  friend bool operator==(const VMvXS&, const VMvXS&) = default;
};

struct SLoadImm {
  std::uint8_t rd;
  std::int64_t imm;
  friend bool operator==(const SLoadImm&, const SLoadImm&) = default;
};

struct SAdd {
  std::uint8_t rd;
  std::uint8_t ra;
  std::uint8_t rb;
  friend bool operator==(const SAdd&, const SAdd&) = default;
};

/// vd[i] += f32(vs2[0]) * vrf[x[rs] & 31][i]
struct VIndexMac {
  std::uint8_t vd;
  std::uint8_t vs2;
  std::uint8_t rs;
  friend bool operator==(const VIndexMac&, const VIndexMac&) = default;
};

using Instruction = std::variant<SetVL, VLoad, VStore, VMaccVx, VAddVx, VSlide1Down,
                                 VMvXS, SLoadImm, SAdd, VIndexMac>;

enum class Opcode : std::uint8_t {
  SetVL,
  VLoad,
  VStore,
  VMaccVx,
  VAddVx,
  VSlide1Down,
  VMvXS,
  SLoadImm,
  SAdd,
  VIndexMac,
};
inline constexpr std::size_t kNumOpcodes = std::variant_size_v<Instruction>;

inline constexpr std::array<const char*, kNumOpcodes> kMnemonics = {
    "setvl",  "vle32.v",       "vse32.v", "vmacc.vx", "vadd.vx",
    "vslide1down", "vmv.x.s", "li",      "add",      "vindexmac.vx",
};

inline Opcode opcode_of(const Instruction& inst) noexcept {
  return static_cast<Opcode>(inst.index());
}

inline const char* mnemonic(Opcode op) noexcept {
  return kMnemonics[static_cast<std::size_t>(op)];
}

inline CostClass cost_class(Opcode op) noexcept {
  switch (op) {
    case Opcode::SetVL: return CostClass::SetVL;
    case Opcode::VLoad: return CostClass::VLoad;
    case Opcode::VStore: return CostClass::VStore;
    case Opcode::VMvXS: return CostClass::Vmv;
    case Opcode::SLoadImm:
    case Opcode::SAdd: return CostClass::Scalar;
    default: return CostClass::Valu;
  }
}

inline bool is_vector(Opcode op) noexcept {
  return op != Opcode::SetVL && op != Opcode::SLoadImm && op != Opcode::SAdd;
}

// --- statistics -------------------------------------------------------------

struct ExecStats {
  std::array<std::uint64_t, kNumOpcodes> issued{};
  std::uint64_t vector_mem_loads = 0;
  std::uint64_t vector_mem_stores = 0;
  std::uint64_t loaded_elements = 0;
  std::uint64_t stored_elements = 0;
  std::uint64_t vrf_indirect_reads = 0;
  std::uint64_t scalar_ops = 0;
  /// Sum of per-instruction costs; loop overhead is added by cycles_of().
  std::uint64_t cycles = 0;

  std::uint64_t count(Opcode op) const noexcept {
    return issued[static_cast<std::size_t>(op)];
  }

  std::uint64_t instructions() const noexcept {
    std::uint64_t total = 0;
    for (auto c : issued) total += c;
    return total;
  }

  std::uint64_t memory_ops() const noexcept { return vector_mem_loads + vector_mem_stores; }

  ExecStats& operator+=(const ExecStats& o) noexcept {
    for (std::size_t i = 0; i < kNumOpcodes; ++i) issued[i] += o.issued[i];
    vector_mem_loads += o.vector_mem_loads;
    vector_mem_stores += o.vector_mem_stores;
    loaded_elements += o.loaded_elements;
    stored_elements += o.stored_elements;
    vrf_indirect_reads += o.vrf_indirect_reads;
    scalar_ops += o.scalar_ops;
    cycles += o.cycles;
    return *this;
  }

  friend bool operator==(const ExecStats&, const ExecStats&) = default;
};

// --- machine state ----------------------------------------------------------

class MachineState {
public:
  MachineState(VectorConfig cfg, std::size_t memory_words)
      : cfg_(cfg), vregs_(std::size_t{kNumRegs} * cfg.vl_max(), 0u),
        mem_(memory_words, 0u) {}

  const VectorConfig& config() const noexcept { return cfg_; }
  unsigned vl_max() const noexcept { return cfg_.vl_max(); }
  std::uint32_t vl() const noexcept { return vl_; }

  std::int64_t x(unsigned r) const { return r == 0 ? 0 : sregs_.at(r); }
  void set_x(unsigned r, std::int64_t v) {
    if (r != 0) sregs_.at(r) = v;
  }

  std::span<std::uint32_t> vreg(unsigned r) {
    return {vregs_.data() + std::size_t{r} * vl_max(), vl_max()};
  }
  std::span<const std::uint32_t> vreg(unsigned r) const {
    return {vregs_.data() + std::size_t{r} * vl_max(), vl_max()};
  }

  std::span<std::uint32_t> memory() noexcept { return mem_; }
  std::span<const std::uint32_t> memory() const noexcept { return mem_; }

  ExecStats& stats() noexcept { return stats_; }
  const ExecStats& stats() const noexcept { return stats_; }

  friend bool operator==(const MachineState&, const MachineState&) = default;

private:
  friend void step(MachineState&, const Instruction&, const CostModel&);

  VectorConfig cfg_;
  std::array<std::int64_t, kNumRegs> sregs_{};
  std::vector<std::uint32_t> vregs_;
  std::vector<std::uint32_t> mem_;
  std::uint32_t vl_ = 0;
  ExecStats stats_;
};

inline float as_float(std::uint32_t w) noexcept { return std::bit_cast<float>(w); }
inline std::uint32_t as_word(float f) noexcept { return std::bit_cast<std::uint32_t>(f); }

/// A vector memory reference as the interpreter would perform it.
struct MemAccess {
  bool store;
  std::int64_t address;
  std::uint32_t length;
};

/// Effective memory reference of `inst` in the current state, if it is a
/// vector load or store.
inline std::optional<MemAccess> memory_access(const MachineState& s,
                                              const Instruction& inst) {
  if (const auto* ld = std::get_if<VLoad>(&inst)) {
    return MemAccess{false, ld->offset + s.x(ld->rs) * ld->stride, s.vl()};
  }
  if (const auto* st = std::get_if<VStore>(&inst)) {
    return MemAccess{true, st->offset + s.x(st->rs) * st->stride, s.vl()};
  }
  return std::nullopt;
}

namespace detail {

inline void check_reg(unsigned r, const char* what) {
  if (r >= kNumRegs) throw ExecFault(std::string("register field ") + what + " out of range");
}

struct Executor {
  MachineState& s;
  std::span<std::uint32_t> vregs;
  std::array<std::int64_t, kNumRegs>& x;
  std::vector<std::uint32_t>& mem;
  std::uint32_t& vl;
  const unsigned vl_max;

  std::span<std::uint32_t> v(unsigned r) const {
    return vregs.subspan(std::size_t{r} * vl_max, vl_max);
  }
  std::int64_t rx(unsigned r) const { return r == 0 ? 0 : x[r]; }
  void wx(unsigned r, std::int64_t val) const {
    if (r != 0) x[r] = val;
  }

  std::size_t address(std::int64_t offset, unsigned rs, std::int64_t stride) const {
    const std::int64_t addr = offset + rx(rs) * stride;
    if (addr < 0 || static_cast<std::uint64_t>(addr) + vl > mem.size()) {
      throw ExecFault("memory access [" + std::to_string(addr) + ", " +
                      std::to_string(addr + static_cast<std::int64_t>(vl)) +
                      ") outside memory of " + std::to_string(mem.size()) + " words");
    }
    return static_cast<std::size_t>(addr);
  }

  void operator()(const SetVL& i) const {
    if (i.vl == 0 || i.vl > vl_max) {
      throw ExecFault("setvl " + std::to_string(i.vl) + " outside [1, " +
                      std::to_string(vl_max) + "]");
    }
    vl = i.vl;
  }
  void operator()(const VLoad& i) const {
    check_reg(i.vd, "vd");
    check_reg(i.rs, "rs");
    const auto a = address(i.offset, i.rs, i.stride);
    std::copy_n(mem.begin() + static_cast<std::ptrdiff_t>(a), vl, v(i.vd).begin());
  }
  void operator()(const VStore& i) const {
    check_reg(i.vs, "vs");
    check_reg(i.rs, "rs");
    const auto a = address(i.offset, i.rs, i.stride);
    auto src = v(i.vs);
    std::copy_n(src.begin(), vl, mem.begin() + static_cast<std::ptrdiff_t>(a));
  }
  void operator()(const VMaccVx& i) const {
    check_reg(i.vd, "vd");
    check_reg(i.rs, "rs");
    check_reg(i.vs2, "vs2");
    const float scalar = as_float(static_cast<std::uint32_t>(rx(i.rs)));
    auto d = v(i.vd);
    auto src = v(i.vs2);
    for (unsigned k = 0; k < vl; ++k) {
      const float prod = scalar * as_float(src[k]);
      d[k] = as_word(as_float(d[k]) + prod);
    }
  }
  void operator()(const VAddVx& i) const {
    check_reg(i.vd, "vd");
    check_reg(i.vs, "vs");
    check_reg(i.rs, "rs");
    const auto scalar = static_cast<std::uint32_t>(rx(i.rs));
    auto d = v(i.vd);
    auto src = v(i.vs);
    for (unsigned k = 0; k < vl; ++k) d[k] = src[k] + scalar;
  }
  void operator()(const VSlide1Down& i) const {
    check_reg(i.vd, "vd");
    check_reg(i.vs, "vs");
    auto d = v(i.vd);
    auto src = v(i.vs);
    // ascending order keeps the in-place (vd == vs) case correct
    for (unsigned k = 0; k + 1 < vl_max; ++k) d[k] = src[k + 1];
    d[vl_max - 1] = 0;
  }
  void operator()(const VMvXS& i) const {
    check_reg(i.rd, "rd");
    check_reg(i.vs, "vs");
    wx(i.rd, static_cast<std::int32_t>(v(i.vs)[0]));
  }
  void operator()(const SLoadImm& i) const {
    check_reg(i.rd, "rd");
    wx(i.rd, i.imm);
  }
  void operator()(const SAdd& i) const {
    check_reg(i.rd, "rd");
    check_reg(i.ra, "ra");
    check_reg(i.rb, "rb");
    wx(i.rd, rx(i.ra) + rx(i.rb));
  }
  void operator()(const VIndexMac& i) const {
    check_reg(i.vd, "vd");
    check_reg(i.vs2, "vs2");
    check_reg(i.rs, "rs");
    const float scalar = as_float(v(i.vs2)[0]);
    const auto src = v(static_cast<unsigned>(rx(i.rs)) & (kNumRegs - 1));
    auto d = v(i.vd);
    for (unsigned k = 0; k < vl; ++k) {
      const float prod = scalar * as_float(src[k]);
      d[k] = as_word(as_float(d[k]) + prod);
    }
  }
};

}  // namespace detail

/// Executes one instruction and charges it to the state's statistics.
/// Throws ExecFault on out-of-range memory, bad register fields, or a vector
/// instruction issued while vl == 0.
inline void step(MachineState& s, const Instruction& inst, const CostModel& cost) {
  const Opcode op = opcode_of(inst);
  if (is_vector(op) && s.vl_ == 0) {
    throw ExecFault(std::string(mnemonic(op)) + " issued with vl == 0");
  }
  std::visit(detail::Executor{s, s.vregs_, s.sregs_, s.mem_, s.vl_, s.vl_max()}, inst);

  auto& st = s.stats_;
  ++st.issued[static_cast<std::size_t>(op)];
  switch (op) {
    case Opcode::VLoad:
      ++st.vector_mem_loads;
      st.loaded_elements += s.vl_;
      break;
    case Opcode::VStore:
      ++st.vector_mem_stores;
      st.stored_elements += s.vl_;
      break;
    case Opcode::VIndexMac: ++st.vrf_indirect_reads; break;
    case Opcode::SLoadImm:
    case Opcode::SAdd: ++st.scalar_ops; break;
    default: break;
  }
  st.cycles += cost.cost(cost_class(op), s.vl_);
}

// --- programs ---------------------------------------------------------------

/// Straight-line instruction trace. `loop_iterations` records how many loop
/// iterations the generator unrolled, for the loop-overhead term of the
/// timing model.
struct Program {
  std::vector<Instruction> code;
  std::uint64_t loop_iterations = 0;

  void emit(const Instruction& inst) { code.push_back(inst); }
  void iteration() { ++loop_iterations; }

  friend bool operator==(const Program&, const Program&) = default;
};

/// Runs `program` on `state`. Returns the statistics of this run alone (the
/// state's own counters accumulate as well). Faults carry the instruction
/// index.
inline ExecStats run(MachineState& state, const Program& program, const CostModel& cost) {
  const ExecStats before = state.stats();
  for (std::size_t pc = 0; pc < program.code.size(); ++pc) {
    try {
      step(state, program.code[pc], cost);
    } catch (const ExecFault& f) {
      throw ExecFault("instruction " + std::to_string(pc) + ": " + f.what(), pc);
    }
  }
  ExecStats delta = state.stats();
  for (std::size_t i = 0; i < kNumOpcodes; ++i) delta.issued[i] -= before.issued[i];
  delta.vector_mem_loads -= before.vector_mem_loads;
  delta.vector_mem_stores -= before.vector_mem_stores;
  delta.loaded_elements -= before.loaded_elements;
  delta.stored_elements -= before.stored_elements;
  delta.vrf_indirect_reads -= before.vrf_indirect_reads;
  delta.scalar_ops -= before.scalar_ops;
  delta.cycles -= before.cycles;
  return delta;
}

/// Instruction sink that executes each instruction as it is emitted, so
/// large kernels never need a materialized Program.
class StreamingExecutor {
public:
  StreamingExecutor(MachineState& state, const CostModel& cost)
      : state_(state), cost_(cost) {}

  /// Counts vector loads whose start address falls in [lo, hi).
  void watch_loads(std::int64_t lo, std::int64_t hi) {
    watch_lo_ = lo;
    watch_hi_ = hi;
  }
  std::uint64_t watched_loads() const noexcept { return watched_; }

  void emit(const Instruction& inst) {
    if (watch_hi_ > watch_lo_ && std::holds_alternative<VLoad>(inst)) {
      const auto acc = memory_access(state_, inst);
      if (acc->address >= watch_lo_ && acc->address < watch_hi_) ++watched_;
    }
    try {
      step(state_, inst, cost_);
    } catch (const ExecFault& f) {
      throw ExecFault("instruction " + std::to_string(issued_) + ": " + f.what(), issued_);
    }
    ++issued_;
  }
  void iteration() { ++loop_iterations_; }

  std::uint64_t loop_iterations() const noexcept { return loop_iterations_; }

private:
  MachineState& state_;
  const CostModel& cost_;
  std::size_t issued_ = 0;
  std::uint64_t loop_iterations_ = 0;
  std::int64_t watch_lo_ = 0;
  std::int64_t watch_hi_ = 0;
  std::uint64_t watched_ = 0;
};

}  // namespace idxmac
