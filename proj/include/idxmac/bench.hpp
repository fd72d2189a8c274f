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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "idxmac/codegen.hpp"
#include "idxmac/config.hpp"
#include "idxmac/isa.hpp"
#include "idxmac/matrix.hpp"
#include "idxmac/timing.hpp"

namespace idxmac {

struct KernelRun {
  KernelKind kind;
  DenseMatrix c;
  ExecStats stats;
  std::uint64_t loop_iterations = 0;
  std::uint64_t cycles = 0;
  PredictedCounts predicted;
  /// Vector loads that read from the B region (preloads included).
  std::uint64_t b_region_loads = 0;
};

/// Plans, generates and executes one kernel on a fresh machine. The dense
/// kernel runs on decode_nm(a) and plans with a 1:1 pattern.
inline KernelRun simulate(KernelKind kind, const StructuredSparseMatrix& a, const DenseMatrix& b,
                          const RunConfig& cfg) {
  const VectorConfig vcfg = cfg.vector_config();
  const KernelShape shape{a.rows(), a.cols(), b.cols()};
  const NMConfig nm = kind == KernelKind::Dense ? NMConfig{1, 1} : a.nm();
  const TilePlan plan =
      plan_tiles({a.rows(), a.cols()}, {b.rows(), b.cols()}, nm, vcfg, cfg.L, cfg.unroll);
  const AddressMap map = AddressMap::packed(kind, shape, a.nm());

  std::optional<MachineState> st;
  if (kind == KernelKind::Dense) {
    st.emplace(load_operands(vcfg, map, decode_nm(a), b));
  } else {
    detail::check_indices(a, plan);
    st.emplace(load_operands(vcfg, map, a, b));
  }
  StreamingExecutor exec(*st, cfg.cost);
  exec.watch_loads(map.b.base, map.b.end());
  switch (kind) {
    case KernelKind::Dense: emit_dense(shape, map, vcfg, plan, exec); break;
    case KernelKind::Spmm: emit_spmm_baseline(shape, a.nm(), map, vcfg, plan, exec); break;
    case KernelKind::IndexMac: emit_spmm_indexmac(shape, a.nm(), map, vcfg, plan, exec); break;
  }
  KernelRun out{kind, read_c(*st, map, a.rows(), b.cols()), st->stats(), exec.loop_iterations(),
                0, analytic_counts(kind, shape, nm, plan, cfg.cost)};
  out.cycles = cycles_of(out.stats, out.loop_iterations, cfg.cost);
  out.b_region_loads = exec.watched_loads();
  return out;
}

struct Verification {
  bool bit_exact = false;
  bool passed = false;
  double max_abs_diff = 0.0;
  double max_rel_diff = 0.0;
};

/// Exact value comparison, falling back to relative tolerance `rel_tol`.
inline Verification verify(const DenseMatrix& got, const DenseMatrix& want, double rel_tol = 1e-5) {
  Verification v;
  if (got.rows() != want.rows() || got.cols() != want.cols()) return v;
  v.bit_exact = true;
  auto g = got.data();
  auto w = want.data();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g[k] == w[k]) continue;
    v.bit_exact = false;
    const double diff = std::fabs(static_cast<double>(g[k]) - w[k]);
    v.max_abs_diff = std::max(v.max_abs_diff, diff);
    const double scale = std::max(std::fabs(static_cast<double>(w[k])), 1e-30);
    v.max_rel_diff = std::max(v.max_rel_diff, diff / scale);
  }
  v.passed = v.bit_exact || v.max_rel_diff <= rel_tol;
  return v;
}

/// 1 - optimized/baseline memory operations.
inline double mem_reduction(std::uint64_t baseline_ops, std::uint64_t optimized_ops) {
  if (baseline_ops == 0) return 0.0;
  return 1.0 - static_cast<double>(optimized_ops) / static_cast<double>(baseline_ops);
}

// --- bench ------------------------------------------------------------------

struct BenchRow {
  std::string layer;
  NMConfig nm;
  KernelKind kind;
  bool ok = false;
  bool counts_match = false;
  std::string error;
  ExecStats stats;
  std::uint64_t cycles = 0;
  double speedup = 1.0;
  double mem_reduction = 0.0;
};

struct AggregateRow {
  NMConfig nm;
  KernelKind kind;
  std::uint64_t vloads = 0;
  std::uint64_t vstores = 0;
  std::uint64_t instructions = 0;
  std::uint64_t cycles = 0;
  double geomean_speedup = 1.0;
  double mem_reduction = 0.0;
  std::size_t layers = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<AggregateRow> aggregates;

  const AggregateRow* aggregate(NMConfig nm, KernelKind kind) const {
    for (const auto& a : aggregates) {
      if (a.nm == nm && a.kind == kind) return &a;
    }
    return nullptr;
  }
  bool all_ok() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const BenchRow& r) { return r.ok && r.counts_match; });
  }
};

inline std::uint64_t layer_seed(std::uint64_t seed, std::size_t layer, NMConfig nm) {
  return seed * 0x9E3779B97F4A7C15ull + layer * 1000003ull + nm.n * 131ull + nm.m;
}

/// Runs the baseline and indexmac kernels on every (layer, sparsity) pair of
/// the suite with random operands, verifying each against the dense oracle
/// and against analytic_counts. An empty `sparsities` uses each layer's own
/// pattern. Layers are spread over `jobs` threads; the report is in suite
/// order regardless.
inline BenchReport run_bench(const LayerSuite& suite, const std::vector<NMConfig>& sparsities,
                             const RunConfig& cfg, unsigned jobs = 1) {
  struct Task {
    std::size_t layer;
    NMConfig nm;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < suite.layers.size(); ++i) {
    if (sparsities.empty()) {
      tasks.push_back({i, suite.layers[i].nm});
    } else {
      for (const auto& nm : sparsities) tasks.push_back({i, nm});
    }
  }
  constexpr KernelKind kinds[] = {KernelKind::Spmm, KernelKind::IndexMac};
  std::vector<BenchRow> rows(tasks.size() * 2);

  auto work = [&](std::size_t t) {
    const Layer& layer = suite.layers[tasks[t].layer];
    const NMConfig nm = tasks[t].nm;
    BenchRow* out = &rows[2 * t];
    for (int k = 0; k < 2; ++k) {
      out[k] = BenchRow{};
      out[k].layer = layer.name;
      out[k].nm = nm;
      out[k].kind = kinds[k];
    }
    try {
      const auto seed = layer_seed(cfg.seed, tasks[t].layer, nm);
      const auto a = random_nm(layer.a_rows, layer.a_cols, nm, seed);
      const auto b = random_dense(layer.a_cols, layer.b_cols, seed + 1);
      const auto oracle = dense_matmul(decode_nm(a), b);
      for (int k = 0; k < 2; ++k) {
        auto res = simulate(kinds[k], a, b, cfg);
        out[k].ok = verify(res.c, oracle).passed;
        if (!out[k].ok) out[k].error = "verification mismatch";
        out[k].counts_match = res.predicted.stats == res.stats &&
                              res.predicted.loop_iterations == res.loop_iterations;
        out[k].stats = res.stats;
        out[k].cycles = res.cycles;
      }
      out[1].speedup = speedup(static_cast<double>(out[0].cycles),
                               static_cast<double>(out[1].cycles));
      out[1].mem_reduction = mem_reduction(out[0].stats.memory_ops(), out[1].stats.memory_ops());
    } catch (const std::exception& e) {
      for (int k = 0; k < 2; ++k) {
        out[k].ok = false;
        out[k].error = e.what();
      }
    }
  };

  jobs = std::max(1u, jobs);
  if (jobs == 1 || tasks.size() <= 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) work(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < std::min<std::size_t>(jobs, tasks.size()); ++j) {
      pool.emplace_back([&] {
        for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();) work(t);
      });
    }
    for (auto& th : pool) th.join();
  }

  BenchReport report;
  report.rows = std::move(rows);
  std::vector<NMConfig> seen;
  for (const auto& task : tasks) {
    if (std::find(seen.begin(), seen.end(), task.nm) == seen.end()) seen.push_back(task.nm);
  }
  for (const auto& nm : seen) {
    AggregateRow agg[2] = {{nm, kinds[0]}, {nm, kinds[1]}};
    double log_sum = 0.0;
    std::size_t ok_layers = 0;
    for (std::size_t r = 0; r + 1 < report.rows.size(); r += 2) {
      const auto& base = report.rows[r];
      const auto& opt = report.rows[r + 1];
      if (!(base.nm == nm) || !base.ok || !opt.ok) continue;
      for (int k = 0; k < 2; ++k) {
        const auto& row = report.rows[r + static_cast<std::size_t>(k)];
        agg[k].vloads += row.stats.vector_mem_loads;
        agg[k].vstores += row.stats.vector_mem_stores;
        agg[k].instructions += row.stats.instructions();
        agg[k].cycles += row.cycles;
        ++agg[k].layers;
      }
      log_sum += std::log(opt.speedup);
      ++ok_layers;
    }
    if (ok_layers) agg[1].geomean_speedup = std::exp(log_sum / static_cast<double>(ok_layers));
    agg[1].mem_reduction =
        mem_reduction(agg[0].vloads + agg[0].vstores, agg[1].vloads + agg[1].vstores);
    report.aggregates.push_back(agg[0]);
    report.aggregates.push_back(agg[1]);
  }
  return report;
}

inline constexpr const char* kCsvHeader =
    "layer,sparsity,kernel,vloads,vstores,total_mem_ops,instructions,cycles,speedup,mem_reduction";

namespace detail {
inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}
}  // namespace detail

/// One row per (layer, sparsity, kernel), then `AGGREGATE` rows per
/// (sparsity, kernel) with the geometric-mean speedup and total memory-access
/// reduction. Failed layers report `error` in the numeric columns.
inline void write_bench_csv(std::ostream& os, const BenchReport& report) {
  os << kCsvHeader << '\n';
  for (const auto& r : report.rows) {
    os << r.layer << ',' << r.nm.str() << ',' << kernel_name(r.kind) << ',';
    if (!r.ok) {
      os << "error,error,error,error,error,error,error\n";
      continue;
    }
    os << r.stats.vector_mem_loads << ',' << r.stats.vector_mem_stores << ','
       << r.stats.memory_ops() << ',' << r.stats.instructions() << ',' << r.cycles << ','
       << detail::fixed6(r.speedup) << ',' << detail::fixed6(r.mem_reduction) << '\n';
  }
  for (const auto& a : report.aggregates) {
    os << "AGGREGATE," << a.nm.str() << ',' << kernel_name(a.kind) << ',' << a.vloads << ','
       << a.vstores << ',' << a.vloads + a.vstores << ',' << a.instructions << ',' << a.cycles
       << ',' << detail::fixed6(a.geomean_speedup) << ',' << detail::fixed6(a.mem_reduction)
       << '\n';
  }
}

}  // namespace idxmac
