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
#include <stdexcept>

#include "idxmac/cost_model.hpp"
#include "idxmac/errors.hpp"
#include "idxmac/isa.hpp"

namespace idxmac {

/// Cycle estimate from class counters:
///   sum(class count * class cost) + elements moved * per_element_mem
///   + loop_iterations * loop_overhead
inline std::uint64_t cycles_of(const ExecStats& stats, std::uint64_t loop_iterations,
                               const CostModel& cost) {
  const std::uint64_t valu_ops = stats.count(Opcode::VMaccVx) + stats.count(Opcode::VAddVx) +
                                 stats.count(Opcode::VSlide1Down) +
                                 stats.count(Opcode::VIndexMac);
  return stats.count(Opcode::VLoad) * cost.vload_base +
         stats.count(Opcode::VStore) * cost.vstore_base +
         (stats.loaded_elements + stats.stored_elements) * cost.per_element_mem +
         valu_ops * cost.valu + stats.count(Opcode::VMvXS) * cost.vmv +
         (stats.count(Opcode::SLoadImm) + stats.count(Opcode::SAdd)) * cost.scalar_op +
         stats.count(Opcode::SetVL) * cost.setvl + loop_iterations * cost.loop_overhead;
}

inline std::uint64_t cycles_of(const Program& program, const ExecStats& stats,
                               const CostModel& cost) {
  return cycles_of(stats, program.loop_iterations, cost);
}

/// baseline / optimized
inline double speedup(double baseline_cycles, double optimized_cycles) {
  if (optimized_cycles <= 0.0 || baseline_cycles <= 0.0) {
    throw std::domain_error("speedup needs positive cycle counts");
  }
  return baseline_cycles / optimized_cycles;
}

}  // namespace idxmac
