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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "idxmac/isa.hpp"
#include "idxmac/program_text.hpp"

namespace idxmac {
namespace {

const CostModel kCost{};

void fill_lanes(MachineState& s, unsigned r, std::initializer_list<float> xs) {
  auto v = s.vreg(r);
  std::size_t k = 0;
  for (float f : xs) v[k++] = as_word(f);
}

std::vector<float> lanes(const MachineState& s, unsigned r, std::size_t n) {
  std::vector<float> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(as_float(s.vreg(r)[k]));
  return out;
}

TEST(VectorConfig, LaneCount) {
  EXPECT_EQ(VectorConfig{}.vl_max(), 16u);
  EXPECT_EQ(VectorConfig::make(128).vl_max(), 4u);
  EXPECT_THROW(VectorConfig::make(100), ConstraintError);
}

TEST(IndexMac, SelectsRegisterByScalar) {
  MachineState s(VectorConfig::make(128), 0);
  fill_lanes(s, 1, {3, 0, 0, 0});
  fill_lanes(s, 5, {10, 20, 30, 40});
  fill_lanes(s, 2, {1, 2, 3, 4});
  s.set_x(7, 5);
  step(s, SetVL{4}, kCost);
  step(s, VIndexMac{2, 1, 7}, kCost);
  EXPECT_EQ(lanes(s, 2, 4), (std::vector<float>{31, 62, 93, 124}));
  EXPECT_EQ(s.stats().vrf_indirect_reads, 1u);
}

TEST(IndexMac, ScalarIsMaskedToFiveBits) {
  MachineState s(VectorConfig::make(128), 0);
  fill_lanes(s, 1, {2, 0, 0, 0});
  fill_lanes(s, 5, {1, 1, 1, 1});
  s.set_x(3, 37);  // 37 & 31 == 5
  step(s, SetVL{4}, kCost);
  step(s, VIndexMac{2, 1, 3}, kCost);
  EXPECT_EQ(lanes(s, 2, 4), (std::vector<float>{2, 2, 2, 2}));
}

TEST(IndexMac, LanesAtOrAboveVlUntouched) {
  MachineState s(VectorConfig::make(128), 0);
  fill_lanes(s, 1, {1, 0, 0, 0});
  fill_lanes(s, 4, {1, 1, 1, 1});
  fill_lanes(s, 2, {0, 0, 9, 9});
  s.set_x(3, 4);
  step(s, SetVL{2}, kCost);
  step(s, VIndexMac{2, 1, 3}, kCost);
  EXPECT_EQ(lanes(s, 2, 4), (std::vector<float>{1, 1, 9, 9}));
}

TEST(Slide1Down, ShiftsWholeRegister) {
  MachineState s(VectorConfig::make(128), 0);
  fill_lanes(s, 3, {1, 2, 3, 4});
  step(s, SetVL{4}, kCost);
  step(s, VSlide1Down{3, 3}, kCost);
  EXPECT_EQ(lanes(s, 3, 4), (std::vector<float>{2, 3, 4, 0}));
}

TEST(Slide1Down, RepeatedSlidesExposeEachLane) {
  MachineState s(VectorConfig::make(128), 0);
  fill_lanes(s, 3, {1, 2, 3, 4});
  step(s, SetVL{1}, kCost);
  for (int k = 0; k < 4; ++k) {
    step(s, VMvXS{9, 3}, kCost);
    EXPECT_EQ(as_float(static_cast<std::uint32_t>(s.x(9))), float(k + 1));
    step(s, VSlide1Down{3, 3}, kCost);
  }
}

TEST(Scalar, RegisterZeroStaysZero) {
  MachineState s(VectorConfig{}, 0);
  step(s, SLoadImm{0, 42}, kCost);
  EXPECT_EQ(s.x(0), 0);
  step(s, SLoadImm{1, 5}, kCost);
  step(s, SAdd{0, 1, 1}, kCost);
  EXPECT_EQ(s.x(0), 0);
  fill_lanes(s, 1, {7});
  step(s, SetVL{1}, kCost);
  step(s, VMvXS{0, 1}, kCost);
  EXPECT_EQ(s.x(0), 0);
}

TEST(Scalar, MoveSignExtends) {
  MachineState s(VectorConfig{}, 0);
  s.vreg(1)[0] = 0xFFFFFFFEu;
  step(s, SetVL{1}, kCost);
  step(s, VMvXS{4, 1}, kCost);
  EXPECT_EQ(s.x(4), -2);
}

TEST(Vector, AddIsIntegerAdd) {
  MachineState s(VectorConfig::make(128), 0);
  auto v = s.vreg(1);
  v[0] = 4;
  v[1] = 5;
  s.set_x(2, -4);
  step(s, SetVL{2}, kCost);
  step(s, VAddVx{3, 1, 2}, kCost);
  EXPECT_EQ(s.vreg(3)[0], 0u);
  EXPECT_EQ(s.vreg(3)[1], 1u);
}

TEST(Memory, LoadStoreUseScaledIndex) {
  MachineState s(VectorConfig::make(128), 32);
  for (std::uint32_t i = 0; i < 32; ++i) s.memory()[i] = i;
  s.set_x(5, 3);
  step(s, SetVL{4}, kCost);
  step(s, VLoad{1, 5, 2, 4}, kCost);  // address 2 + 3*4 = 14
  EXPECT_EQ(s.vreg(1)[0], 14u);
  EXPECT_EQ(s.vreg(1)[3], 17u);
  step(s, VStore{1, 0, 0, 0}, kCost);
  EXPECT_EQ(s.memory()[0], 14u);
  EXPECT_EQ(s.stats().vector_mem_loads, 1u);
  EXPECT_EQ(s.stats().vector_mem_stores, 1u);
  EXPECT_EQ(s.stats().loaded_elements, 4u);
}

TEST(Faults, VectorOpBeforeSetVL) {
  MachineState s(VectorConfig{}, 64);
  EXPECT_THROW(step(s, VLoad{1, 0, 0, 0}, kCost), ExecFault);
  EXPECT_THROW(step(s, VIndexMac{1, 2, 3}, kCost), ExecFault);
}

TEST(Faults, OutOfRangeMemory) {
  MachineState s(VectorConfig{}, 20);
  step(s, SetVL{16}, kCost);
  EXPECT_THROW(step(s, VLoad{1, 0, 8, 0}, kCost), ExecFault);
  EXPECT_THROW(step(s, VStore{1, 0, -1, 0}, kCost), ExecFault);
  EXPECT_NO_THROW(step(s, VLoad{1, 0, 4, 0}, kCost));
}

TEST(Faults, BadSetVLAndRegisters) {
  MachineState s(VectorConfig{}, 16);
  EXPECT_THROW(step(s, SetVL{0}, kCost), ExecFault);
  EXPECT_THROW(step(s, SetVL{17}, kCost), ExecFault);
  step(s, SetVL{1}, kCost);
  EXPECT_THROW(step(s, VMaccVx{32, 0, 0}, kCost), ExecFault);
}

TEST(Faults, RunReportsInstructionIndex) {
  MachineState s(VectorConfig{}, 4);
  Program p;
  p.emit(SetVL{16});
  p.emit(SLoadImm{1, 0});
  p.emit(VLoad{1, 0, 0, 0});
  try {
    run(s, p, kCost);
    FAIL() << "expected a fault";
  } catch (const ExecFault& f) {
    EXPECT_EQ(f.index(), 2u);
  }
}

TEST(Run, EmptyProgramIsNoOp) {
  MachineState s(VectorConfig{}, 8);
  s.memory()[3] = 99;
  const MachineState before = s;
  EXPECT_EQ(run(s, Program{}, kCost), ExecStats{});
  EXPECT_EQ(s, before);
}

TEST(Run, CountsEachLoad) {
  for (unsigned k = 0; k < 6; ++k) {
    MachineState s(VectorConfig{}, 64);
    Program p;
    p.emit(SetVL{8});
    for (unsigned i = 0; i < k; ++i) p.emit(VLoad{1, 0, std::int64_t{i}, 0});
    EXPECT_EQ(run(s, p, kCost).vector_mem_loads, k);
  }
}

TEST(Run, ArithmeticLeavesMemoryAlone) {
  MachineState s(VectorConfig{}, 16);
  for (std::uint32_t i = 0; i < 16; ++i) s.memory()[i] = i * 7;
  const auto mem = std::vector<std::uint32_t>(s.memory().begin(), s.memory().end());
  Program p;
  p.emit(SetVL{16});
  p.emit(VMaccVx{1, 2, 3});
  p.emit(VAddVx{4, 1, 2});
  p.emit(VSlide1Down{4, 4});
  p.emit(VIndexMac{5, 4, 1});
  p.emit(SAdd{3, 2, 1});
  run(s, p, kCost);
  EXPECT_EQ(std::vector<std::uint32_t>(s.memory().begin(), s.memory().end()), mem);
}

// --- property: vindexmac equals its scalar-register expansion -------------

Instruction random_instruction(std::mt19937_64& rng) {
  auto reg = [&] { return static_cast<std::uint8_t>(rng() % 32); };
  auto imm = [&] { return static_cast<std::int64_t>(rng() % 2001) - 1000; };
  switch (rng() % kNumOpcodes) {
    case 0: return SetVL{static_cast<std::uint32_t>(1 + rng() % 16)};
    case 1: return VLoad{reg(), reg(), imm(), imm()};
    case 2: return VStore{reg(), reg(), imm(), imm()};
    case 3: return VMaccVx{reg(), reg(), reg()};
    case 4: return VAddVx{reg(), reg(), reg()};
    case 5: return VSlide1Down{reg(), reg()};
    case 6: return VMvXS{reg(), reg()};
    case 7: return SLoadImm{reg(), imm()};
    case 8: return SAdd{reg(), reg(), reg()};
    default: return VIndexMac{reg(), reg(), reg()};
  }
}

MachineState random_state(std::mt19937_64& rng, VectorConfig cfg) {
  MachineState s(cfg, 0);
  std::uniform_real_distribution<float> val(-4.0f, 4.0f);
  for (unsigned r = 0; r < kNumRegs; ++r) {
    for (auto& w : s.vreg(r)) w = as_word(val(rng));
    s.set_x(r, static_cast<std::int64_t>(rng() % 64));
  }
  return s;
}

TEST(IndexMac, EqualsMoveThenMaccProperty) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto cfg = VectorConfig::make(trial % 2 ? 512 : 256);
    MachineState a = random_state(rng, cfg);
    const auto vl = static_cast<std::uint32_t>(1 + rng() % cfg.vl_max());
    step(a, SetVL{vl}, kCost);
    const auto vd = static_cast<std::uint8_t>(rng() % 32);
    const auto vs2 = static_cast<std::uint8_t>(rng() % 32);
    const auto rs = static_cast<std::uint8_t>(1 + rng() % 30);
    const auto tmp = static_cast<std::uint8_t>(31);
    MachineState b = a;
    const auto src = static_cast<std::uint8_t>(a.x(rs) & 31);

    step(a, VIndexMac{vd, vs2, rs}, kCost);
    step(b, VMvXS{tmp, vs2}, kCost);
    step(b, VMaccVx{vd, tmp, src}, kCost);
    for (unsigned r = 0; r < kNumRegs; ++r) {
      ASSERT_TRUE(std::ranges::equal(a.vreg(r), b.vreg(r))) << "trial " << trial;
    }
  }
}

TEST(Run, Deterministic) {
  std::mt19937_64 rng(77);
  Program p;
  p.emit(SetVL{16});
  for (int i = 0; i < 200; ++i) {
    auto inst = random_instruction(rng);
    // keep the trace fault-free: arithmetic and register traffic only
    if (std::holds_alternative<VLoad>(inst) || std::holds_alternative<VStore>(inst)) continue;
    p.emit(inst);
  }
  std::mt19937_64 seed_a(5), seed_b(5);
  MachineState a = random_state(seed_a, VectorConfig{});
  MachineState b = random_state(seed_b, VectorConfig{});
  const auto sa = run(a, p, kCost);
  const auto sb = run(b, p, kCost);
  EXPECT_EQ(sa, sb);
  EXPECT_EQ(a, b);
}

// --- text form ------------------------------------------------------------

TEST(ProgramText, InstructionRoundTrip) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 500; ++i) {
    const auto inst = random_instruction(rng);
    EXPECT_EQ(parse_instruction(to_text(inst)), inst) << to_text(inst);
  }
}

TEST(ProgramText, ProgramRoundTripKeepsIterations) {
  std::mt19937_64 rng(9);
  Program p;
  for (int i = 0; i < 50; ++i) p.emit(random_instruction(rng));
  p.loop_iterations = 17;
  EXPECT_EQ(parse_program(to_text(p)), p);
}

TEST(ProgramText, Examples) {
  EXPECT_EQ(to_text(VIndexMac{8, 9, 3}), "vindexmac.vx v8, v9, x3");
  EXPECT_EQ(to_text(VLoad{1, 0, 64, 0}), "vle32.v v1, 64");
  EXPECT_EQ(parse_instruction("  vle32.v v2, 10(x4*3)  "), (Instruction{VLoad{2, 4, 10, 3}}));
}

TEST(ProgramText, RejectsGarbage) {
  EXPECT_THROW(parse_instruction("vfoo v1"), FormatError);
  EXPECT_THROW(parse_instruction("vmacc.vx v1, x2"), FormatError);
  EXPECT_THROW(parse_instruction("vmacc.vx v40, x2, v3"), FormatError);
}

}  // namespace
}  // namespace idxmac
