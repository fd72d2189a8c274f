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

// idxmac: matrix generation, kernel execution and benchmark sweeps for the
// vector-engine simulator.
//
// Exit codes: 0 success, 1 verification failure, 2 constraint/format error,
// 3 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "idxmac/bench.hpp"
#include "idxmac/codegen.hpp"
#include "idxmac/config.hpp"
#include "idxmac/matrix.hpp"
#include "idxmac/mtxt.hpp"
#include "idxmac/program_text.hpp"

namespace {

using namespace idxmac;

enum ExitCode { kOk = 0, kVerifyFailed = 1, kBadInput = 2, kIoFailed = 3 };

struct CommonOpts {
  std::string config_path;
  std::optional<std::size_t> L;
  std::optional<std::size_t> unroll;
  std::optional<unsigned> vlen;
  std::optional<std::uint64_t> seed;

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (L) cfg.L = *L;
    if (unroll) cfg.unroll = *unroll;
    if (vlen) cfg.vlen_bits = *vlen;
    if (seed) cfg.seed = *seed;
    if (!cfg.cost.valid()) throw ConstraintError("vload_base must be >= valu");
    return cfg;
  }
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "key = value run configuration file");
  cmd->add_option("--L", o.L, "rows of B preloaded per k-tile");
  cmd->add_option("--unroll", o.unroll, "output rows per unrolled iteration");
  cmd->add_option("--vlen", o.vlen, "vector register width in bits");
  cmd->add_option("--seed", o.seed, "random seed");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

// --- gen --------------------------------------------------------------------

struct GenOpts {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string nm;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_gen(const GenOpts& o) {
  if (o.nm.empty()) {
    save_mtxt(o.out, random_dense(o.rows, o.cols, o.seed));
  } else {
    save_mtxt(o.out, random_nm(o.rows, o.cols, NMConfig::parse(o.nm), o.seed));
  }
  std::cout << "wrote " << o.out << '\n';
  return kOk;
}

// --- prune ------------------------------------------------------------------

struct PruneOpts {
  std::string in;
  std::string nm;
  std::string out;
  bool keep_dense = false;
};

int cmd_prune(const PruneOpts& o) {
  const auto m = load_mtxt(o.in);
  const auto* dense = std::get_if<DenseMatrix>(&m);
  if (!dense) throw FormatError(o.in + ": prune expects a dense matrix");
  const NMConfig nm = NMConfig::parse(o.nm);
  const DenseMatrix pruned = prune_nm(*dense, nm);
  if (o.keep_dense) {
    save_mtxt(o.out, pruned);
  } else {
    save_mtxt(o.out, encode_nm(pruned, nm));
  }
  std::cout << "wrote " << o.out << '\n';
  return kOk;
}

// --- validate ---------------------------------------------------------------

struct ValidateOpts {
  std::string in;
  std::string nm;
};

int cmd_validate(const ValidateOpts& o) {
  const auto m = load_mtxt(o.in);  // nm files are validated on construction
  if (const auto* s = std::get_if<StructuredSparseMatrix>(&m)) {
    std::cout << o.in << ": valid " << s->nm().str() << " matrix " << s->rows() << "x"
              << s->cols() << '\n';
    return kOk;
  }
  const auto& d = std::get<DenseMatrix>(m);
  if (!o.nm.empty()) {
    encode_nm(d, NMConfig::parse(o.nm));  // throws on an over-dense block
    std::cout << o.in << ": dense " << d.rows() << "x" << d.cols() << " satisfies " << o.nm
              << '\n';
  } else {
    std::cout << o.in << ": valid dense matrix " << d.rows() << "x" << d.cols() << '\n';
  }
  return kOk;
}

// --- run --------------------------------------------------------------------

struct RunOpts {
  std::string a_path;
  std::string b_path;
  std::string kernel = "indexmac";
  std::string nm;
  std::string csv;
  std::string dump;
  CommonOpts common;
};

StructuredSparseMatrix sparse_operand(const AnyMatrix& m, const std::string& nm) {
  if (const auto* s = std::get_if<StructuredSparseMatrix>(&m)) return *s;
  if (nm.empty()) throw FormatError("A is dense: pass --nm to encode it");
  return encode_nm(std::get<DenseMatrix>(m), NMConfig::parse(nm));
}

int cmd_run(const RunOpts& o) {
  const RunConfig cfg = o.common.resolve();
  const StructuredSparseMatrix a = sparse_operand(load_mtxt(o.a_path), o.nm);
  const auto b_any = load_mtxt(o.b_path);
  const auto* b = std::get_if<DenseMatrix>(&b_any);
  if (!b) throw FormatError(o.b_path + ": B must be a dense matrix");
  if (a.cols() != b->rows()) {
    throw ShapeError("A is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " but B is " + std::to_string(b->rows()) + "x" + std::to_string(b->cols()));
  }

  std::vector<KernelKind> kinds;
  if (o.kernel == "all") {
    kinds = {KernelKind::Dense, KernelKind::Spmm, KernelKind::IndexMac};
  } else {
    kinds = {parse_kernel(o.kernel)};
  }

  const DenseMatrix oracle = dense_matmul(decode_nm(a), *b);
  std::vector<KernelRun> runs;
  for (auto k : kinds) runs.push_back(simulate(k, a, *b, cfg));

  if (!o.dump.empty()) {
    const VectorConfig vcfg = cfg.vector_config();
    const KernelKind k = kinds.back();
    const NMConfig nm = k == KernelKind::Dense ? NMConfig{1, 1} : a.nm();
    const auto plan = plan_tiles({a.rows(), a.cols()}, {b->rows(), b->cols()}, nm, vcfg, cfg.L,
                                 cfg.unroll);
    const KernelShape shape{a.rows(), a.cols(), b->cols()};
    const auto map = AddressMap::packed(k, shape, a.nm());
    Program p = k == KernelKind::Dense  ? gen_dense(shape, map, vcfg, plan)
                : k == KernelKind::Spmm ? gen_spmm_baseline(a, b->cols(), map, vcfg, plan)
                                        : gen_spmm_indexmac(a, b->cols(), map, vcfg, plan);
    auto out = open_out(o.dump);
    write_program(out, p);
  }

  const KernelRun* baseline = nullptr;
  for (const auto& r : runs) {
    if (r.kind == KernelKind::Spmm) baseline = &r;
  }

  bool all_ok = true;
  BenchReport csv;
  for (const auto& r : runs) {
    const auto v = verify(r.c, oracle);
    all_ok = all_ok && v.passed;
    const std::uint64_t preloads = r.predicted.b_preload_loads;
    std::cout << "kernel " << kernel_name(r.kind) << ": "
              << (v.passed ? (v.bit_exact ? "verified (bit-exact)" : "verified (rel tol)")
                           : "MISMATCH")
              << "  max_abs_diff=" << v.max_abs_diff << '\n'
              << "  instructions    " << r.stats.instructions() << '\n'
              << "  vector loads    " << r.stats.vector_mem_loads << '\n'
              << "  vector stores   " << r.stats.vector_mem_stores << '\n'
              << "  B-region loads  " << r.b_region_loads << " (outside prologue: "
              << r.b_region_loads - preloads << ")\n"
              << "  vindexmac reads " << r.stats.vrf_indirect_reads << '\n'
              << "  scalar ops      " << r.stats.scalar_ops << '\n'
              << "  loop iterations " << r.loop_iterations << '\n'
              << "  cycles          " << r.cycles << '\n'
              << "  counts match analytic model: "
              << (r.predicted.stats == r.stats && r.predicted.loop_iterations == r.loop_iterations
                      ? "yes"
                      : "NO")
              << '\n';
    for (std::size_t op = 0; op < kNumOpcodes; ++op) {
      if (r.stats.issued[op]) {
        std::cout << "    " << kMnemonics[op] << ' ' << r.stats.issued[op] << '\n';
      }
    }
    BenchRow row;
    row.layer = o.a_path;
    row.nm = a.nm();
    row.kind = r.kind;
    row.ok = v.passed;
    row.counts_match = r.predicted.stats == r.stats;
    row.stats = r.stats;
    row.cycles = r.cycles;
    if (baseline) {
      row.speedup = speedup(static_cast<double>(baseline->cycles), static_cast<double>(r.cycles));
      row.mem_reduction = mem_reduction(baseline->stats.memory_ops(), r.stats.memory_ops());
      std::cout << "  speedup vs spmm " << row.speedup << "  mem reduction " << row.mem_reduction
                << '\n';
    }
    csv.rows.push_back(row);
  }
  if (!o.csv.empty()) {
    auto out = open_out(o.csv);
    write_bench_csv(out, csv);
  }
  return all_ok ? kOk : kVerifyFailed;
}

// --- bench ------------------------------------------------------------------

struct BenchOpts {
  std::vector<std::string> suites;
  std::string sparsities = "1:4,2:4";
  std::string csv;
  unsigned jobs = 1;
  CommonOpts common;
};

int cmd_bench(const BenchOpts& o) {
  const RunConfig cfg = o.common.resolve();
  std::vector<NMConfig> nms;
  std::stringstream ss(o.sparsities);
  for (std::string tok; std::getline(ss, tok, ',');) {
    if (!tok.empty()) nms.push_back(NMConfig::parse(tok));
  }
  LayerSuite merged;
  for (const auto& path : o.suites) {
    auto s = load_suite(path);
    for (auto& l : s.layers) {
      l.name = s.name + "/" + l.name;
      merged.layers.push_back(std::move(l));
    }
  }
  const BenchReport report = run_bench(merged, nms, cfg, o.jobs);
  if (o.csv.empty()) {
    write_bench_csv(std::cout, report);
  } else {
    auto out = open_out(o.csv);
    write_bench_csv(out, report);
  }
  bool ok = true;
  for (const auto& r : report.rows) {
    if (!r.ok) {
      std::cerr << r.layer << ' ' << r.nm.str() << ' ' << kernel_name(r.kind) << ": " << r.error
                << '\n';
      ok = false;
    } else if (!r.counts_match) {
      std::cerr << r.layer << ' ' << r.nm.str() << ' ' << kernel_name(r.kind)
                << ": counters disagree with the analytic model\n";
      ok = false;
    }
  }
  for (const auto& agg : report.aggregates) {
    if (agg.kind != KernelKind::IndexMac) continue;
    std::cerr << "aggregate " << agg.nm.str() << ": geomean speedup " << agg.geomean_speedup
              << ", memory-access reduction " << agg.mem_reduction << " over " << agg.layers
              << " layers\n";
  }
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vector-engine simulator for N:M sparse x dense matrix multiplication"};
  app.require_subcommand(1);

  GenOpts gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a random dense or N:M matrix");
  gen_cmd->add_option("--rows", gen.rows, "rows")->required();
  gen_cmd->add_option("--cols", gen.cols, "columns")->required();
  gen_cmd->add_option("--nm", gen.nm, "N:M pattern (omit for a dense matrix)");
  gen_cmd->add_option("--seed", gen.seed, "random seed");
  gen_cmd->add_option("--out,-o", gen.out, "output .mtxt file")->required();

  PruneOpts prune;
  auto* prune_cmd = app.add_subcommand("prune", "magnitude-prune a dense matrix to N:M");
  prune_cmd->add_option("--in,-i", prune.in, "dense .mtxt input")->required();
  prune_cmd->add_option("--nm", prune.nm, "N:M pattern")->required();
  prune_cmd->add_option("--out,-o", prune.out, "output .mtxt file")->required();
  prune_cmd->add_flag("--keep-dense", prune.keep_dense, "write the pruned dense matrix");

  RunOpts run;
  auto* run_cmd = app.add_subcommand("run", "execute a kernel and verify it");
  run_cmd->add_option("--a", run.a_path, "A (.mtxt, nm or dense)")->required();
  run_cmd->add_option("--b", run.b_path, "B (.mtxt, dense)")->required();
  run_cmd->add_option("--kernel,-k", run.kernel, "dense|spmm|indexmac|all");
  run_cmd->add_option("--nm", run.nm, "N:M pattern used to encode a dense A");
  run_cmd->add_option("--csv", run.csv, "write a CSV report");
  run_cmd->add_option("--dump-program", run.dump, "write the generated program as text");
  add_common(run_cmd, run.common);

  BenchOpts bench;
  auto* bench_cmd = app.add_subcommand("bench", "sweep layer suites");
  bench_cmd->add_option("--suite,-s", bench.suites, "layer suite file(s)")->required();
  bench_cmd->add_option("--sparsity", bench.sparsities, "comma-separated N:M list");
  bench_cmd->add_option("--csv", bench.csv, "CSV output (default stdout)");
  bench_cmd->add_option("--jobs,-j", bench.jobs, "worker threads");
  add_common(bench_cmd, bench.common);

  ValidateOpts validate;
  auto* validate_cmd = app.add_subcommand("validate", "check an .mtxt file");
  validate_cmd->add_option("--in,-i", validate.in, ".mtxt file")->required();
  validate_cmd->add_option("--nm", validate.nm, "also check a dense matrix against N:M");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kBadInput;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*prune_cmd) return cmd_prune(prune);
    if (*run_cmd) return cmd_run(run);
    if (*bench_cmd) return cmd_bench(bench);
    if (*validate_cmd) return cmd_validate(validate);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoFailed;
  } catch (const std::invalid_argument& e) {  // shape, format, constraint
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const ExecFault& e) {
    std::cerr << "execution fault: " << e.what() << '\n';
    return kBadInput;
  }
  return kOk;
}
