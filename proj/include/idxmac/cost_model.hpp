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

#include <cstdint>

namespace idxmac {

/// Cost buckets an instruction is charged to.
enum class CostClass { VLoad, VStore, Valu, Vmv, Scalar, SetVL };

/// Cycle cost per instruction class. Memory instructions pay a fixed base plus
/// a per-element term scaled by the active vector length; VIndexMac is an
/// ordinary vector ALU op. Defaults follow a 8-cycle L2 hit.
struct CostModel {
  std::uint64_t vload_base = 8;
  std::uint64_t vstore_base = 8;
  std::uint64_t per_element_mem = 1;
  std::uint64_t valu = 1;
  std::uint64_t vmv = 1;
  std::uint64_t scalar_op = 1;
  std::uint64_t setvl = 1;
  std::uint64_t loop_overhead = 2;

  static CostModel zero() { return CostModel{0, 0, 0, 0, 0, 0, 0, 0}; }

  /// Memory must not be cheaper than a register-file read.
  bool valid() const noexcept { return vload_base >= valu; }

  std::uint64_t cost(CostClass cls, std::uint64_t vl) const {
    switch (cls) {
      case CostClass::VLoad: return vload_base + per_element_mem * vl;
      case CostClass::VStore: return vstore_base + per_element_mem * vl;
      case CostClass::Valu: return valu;
      case CostClass::Vmv: return vmv;
      case CostClass::Scalar: return scalar_op;
      case CostClass::SetVL: return setvl;
    }
    return 0;
  }

  friend bool operator==(const CostModel&, const CostModel&) = default;
};

}  // namespace idxmac
