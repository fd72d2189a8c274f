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

// Textual program dumps: one instruction per line, `mnemonic op1, op2, ...`.
// Memory operands are `offset` or `offset(xN*stride)`. A program starts with
// a `.iterations N` directive; `#` starts a comment.

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "idxmac/isa.hpp"

namespace idxmac {

namespace detail {

struct TextFormatter {
  std::string operator()(const SetVL& i) const { return "setvl " + std::to_string(i.vl); }
  std::string operator()(const VLoad& i) const {
    return std::string("vle32.v v") + std::to_string(i.vd) + ", " +
           mem_operand(i.rs, i.offset, i.stride);
  }
  std::string operator()(const VStore& i) const {
    return std::string("vse32.v v") + std::to_string(i.vs) + ", " +
           mem_operand(i.rs, i.offset, i.stride);
  }
  std::string operator()(const VMaccVx& i) const {
    return "vmacc.vx v" + std::to_string(i.vd) + ", x" + std::to_string(i.rs) + ", v" +
           std::to_string(i.vs2);
  }
  std::string operator()(const VAddVx& i) const {
    return "vadd.vx v" + std::to_string(i.vd) + ", v" + std::to_string(i.vs) + ", x" +
           std::to_string(i.rs);
  }
  std::string operator()(const VSlide1Down& i) const {
    return "vslide1down v" + std::to_string(i.vd) + ", v" + std::to_string(i.vs);
  }
  std::string operator()(const VMvXS& i) const {
    return "vmv.x.s x" + std::to_string(i.rd) + ", v" + std::to_string(i.vs);
  }
  std::string operator()(const SLoadImm& i) const {
    return "li x" + std::to_string(i.rd) + ", " + std::to_string(i.imm);
  }
  std::string operator()(const SAdd& i) const {
    return "add x" + std::to_string(i.rd) + ", x" + std::to_string(i.ra) + ", x" +
           std::to_string(i.rb);
  }
  std::string operator()(const VIndexMac& i) const {
    return "vindexmac.vx v" + std::to_string(i.vd) + ", v" + std::to_string(i.vs2) +
           ", x" + std::to_string(i.rs);
  }

  static std::string mem_operand(std::uint8_t rs, std::int64_t offset, std::int64_t stride) {
    if (rs == 0 && stride == 0) return std::to_string(offset);
    return std::to_string(offset) + "(x" + std::to_string(rs) + "*" +
           std::to_string(stride) + ")";
  }
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::int64_t parse_int(std::string_view s, std::string_view line) {
  s = trim(s);
  std::int64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw FormatError("bad integer '" + std::string(s) + "' in '" + std::string(line) + "'");
  }
  return v;
}

inline std::uint8_t parse_reg(std::string_view s, char kind, std::string_view line) {
  s = trim(s);
  if (s.size() < 2 || s.front() != kind) {
    throw FormatError("expected " + std::string(1, kind) + "-register, got '" +
                      std::string(s) + "' in '" + std::string(line) + "'");
  }
  const auto n = parse_int(s.substr(1), line);
  if (n < 0 || n >= static_cast<std::int64_t>(kNumRegs)) {
    throw FormatError("register out of range in '" + std::string(line) + "'");
  }
  return static_cast<std::uint8_t>(n);
}

struct MemOperand {
  std::uint8_t rs = 0;
  std::int64_t offset = 0;
  std::int64_t stride = 0;
};

inline MemOperand parse_mem(std::string_view s, std::string_view line) {
  s = trim(s);
  const auto open = s.find('(');
  if (open == std::string_view::npos) return {0, parse_int(s, line), 0};
  const auto star = s.find('*', open);
  if (star == std::string_view::npos || s.back() != ')') {
    throw FormatError("bad memory operand in '" + std::string(line) + "'");
  }
  MemOperand m;
  m.offset = parse_int(s.substr(0, open), line);
  m.rs = parse_reg(s.substr(open + 1, star - open - 1), 'x', line);
  m.stride = parse_int(s.substr(star + 1, s.size() - star - 2), line);
  return m;
}

}  // namespace detail

inline std::string to_text(const Instruction& inst) {
  return std::visit(detail::TextFormatter{}, inst);
}

inline Instruction parse_instruction(std::string_view line) {
  const std::string_view full = line;
  line = detail::trim(line);
  const auto sp = line.find_first_of(" \t");
  const std::string_view mn = line.substr(0, sp);
  std::vector<std::string_view> ops;
  if (sp != std::string_view::npos) {
    std::string_view rest = line.substr(sp + 1);
    while (true) {
      const auto comma = rest.find(',');
      ops.push_back(detail::trim(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  auto need = [&](std::size_t n) {
    if (ops.size() != n) {
      throw FormatError("'" + std::string(mn) + "' takes " + std::to_string(n) +
                        " operands: '" + std::string(full) + "'");
    }
  };
  using detail::parse_reg;
  if (mn == "setvl") {
    need(1);
    const auto vl = detail::parse_int(ops[0], full);
    if (vl < 0 || vl > 0xffffffffLL) throw FormatError("bad vl in '" + std::string(full) + "'");
    return SetVL{static_cast<std::uint32_t>(vl)};
  }
  if (mn == "vle32.v" || mn == "vse32.v") {
    need(2);
    const auto r = parse_reg(ops[0], 'v', full);
    const auto m = detail::parse_mem(ops[1], full);
    if (mn == "vle32.v") return VLoad{r, m.rs, m.offset, m.stride};
    return VStore{r, m.rs, m.offset, m.stride};
  }
  if (mn == "vmacc.vx") {
    need(3);
    return VMaccVx{parse_reg(ops[0], 'v', full), parse_reg(ops[1], 'x', full),
                   parse_reg(ops[2], 'v', full)};
  }
  if (mn == "vadd.vx") {
    need(3);
    return VAddVx{parse_reg(ops[0], 'v', full), parse_reg(ops[1], 'v', full),
                  parse_reg(ops[2], 'x', full)};
  }
  if (mn == "vslide1down") {
    need(2);
    return VSlide1Down{parse_reg(ops[0], 'v', full), parse_reg(ops[1], 'v', full)};
  }
  if (mn == "vmv.x.s") {
    need(2);
    return VMvXS{parse_reg(ops[0], 'x', full), parse_reg(ops[1], 'v', full)};
  }
  if (mn == "li") {
    need(2);
    return SLoadImm{parse_reg(ops[0], 'x', full), detail::parse_int(ops[1], full)};
  }
  if (mn == "add") {
    need(3);
    return SAdd{parse_reg(ops[0], 'x', full), parse_reg(ops[1], 'x', full),
                parse_reg(ops[2], 'x', full)};
  }
  if (mn == "vindexmac.vx") {
    need(3);
    return VIndexMac{parse_reg(ops[0], 'v', full), parse_reg(ops[1], 'v', full),
                     parse_reg(ops[2], 'x', full)};
  }
  throw FormatError("unknown mnemonic '" + std::string(mn) + "'");
}

inline void write_program(std::ostream& os, const Program& p) {
  os << ".iterations " << p.loop_iterations << '\n';
  for (const auto& inst : p.code) os << to_text(inst) << '\n';
}

inline std::string to_text(const Program& p) {
  std::ostringstream os;
  write_program(os, p);
  return os.str();
}

inline Program read_program(std::istream& is) {
  Program p;
  std::string raw;
  while (std::getline(is, raw)) {
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.starts_with(".iterations")) {
      const auto n = detail::parse_int(line.substr(11), raw);
      if (n < 0) throw FormatError("negative iteration count");
      p.loop_iterations = static_cast<std::uint64_t>(n);
      continue;
    }
    p.code.push_back(parse_instruction(line));
  }
  return p;
}

inline Program parse_program(std::string_view text) {
  std::istringstream is{std::string(text)};
  return read_program(is);
}

}  // namespace idxmac
