// Benchmark and validation driver: times forward+backward 3D transforms
// over an in-process rank harness, checks the round trip, and emits CSV
// records consumable by the fit tool.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pencilfft/bench.hpp"

using namespace pencilfft;

int main(int argc, char** argv) {
  CLI::App app{"pencil-decomposed 3D FFT benchmark"};

  std::vector<int> grid{16, 16, 16};
  app.add_option("--grid", grid, "grid dimensions NX,NY,NZ")
      ->delimiter(',')
      ->expected(3);
  bench::BenchConfig cfg;
  app.add_option("--ranks", cfg.ranks, "number of ranks P");

  std::vector<int> procgrid;
  auto* opt_pg =
      app.add_option("--procgrid", procgrid, "explicit processor grid M1,M2")
          ->delimiter(',')
          ->expected(2);
  auto* opt_sweep = app.add_flag(
      "--sweep", "run every factorization M1*M2 = P and report each");
  int cores_per_node = 0;
  auto* opt_auto = app.add_option(
      "--auto", cores_per_node,
      "pick M1 as the smallest divisor of P at least this large");
  opt_pg->excludes(opt_sweep)->excludes(opt_auto);
  opt_sweep->excludes(opt_auto);

  app.add_flag("--stride1", cfg.stride1,
               "reorder locally so every 1D transform is unit-stride");
  app.add_flag("--useeven", cfg.useeven,
               "pad exchanges to even blocks instead of varying counts");
  std::string third = "fft";
  app.add_option("--third", third, "third-dimension transform")
      ->check(CLI::IsMember({"fft", "cheb", "empty"}));
  app.add_option("--iters", cfg.iters, "timed iterations per point");
  app.add_option("--warmup", cfg.warmup, "untimed warmup iterations");
  app.add_option("--seed", cfg.seed, "seed of the oracle's random field");
  std::string out_path;
  app.add_option("--out", out_path, "append records to this CSV file");
  app.add_flag("--oracle", cfg.oracle,
               "cross-check against a direct-sum serial transform "
               "(grids up to 32^3)");

  CLI11_PARSE(app, argc, argv);

  cfg.nx = grid[0];
  cfg.ny = grid[1];
  cfg.nz = grid[2];
  cfg.third = third == "fft" ? ThirdKind::Fft
              : third == "cheb" ? ThirdKind::Cheb
                                : ThirdKind::Empty;
  if (opt_pg->count()) {
    cfg.mode = bench::GridMode::Explicit;
    cfg.m1 = procgrid[0];
    cfg.m2 = procgrid[1];
  } else if (opt_sweep->count()) {
    cfg.mode = bench::GridMode::Sweep;
  } else {
    cfg.mode = bench::GridMode::Auto;
    cfg.cores_per_node = opt_auto->count() ? cores_per_node : 1;
  }

  std::vector<bench::BenchRecord> records;
  try {
    records = bench::run(cfg);
    if (!out_path.empty()) bench::append_csv(out_path, records);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  bool all_pass = true;
  for (const auto& r : records) {
    std::printf(
        "%dx%dx%d P=%d grid %dx%d stride1=%d useeven=%d third=%s  "
        "t=%.6f s (min %.6f max %.6f) comm=%.6f s  err=%.3e  %s%s%s\n",
        r.nx, r.ny, r.nz, r.p, r.m1, r.m2, r.stride1 ? 1 : 0,
        r.useeven ? 1 : 0, to_string(r.third), r.t_mean, r.t_min, r.t_max,
        r.t_comm_mean, r.max_rel_err, r.pass ? "pass" : "FAIL",
        r.note.empty() ? "" : "  ", r.note.c_str());
    all_pass = all_pass && r.pass;
  }
  if (records.size() > 1) {
    try {
      for (const auto& b : bench::sweep_report(records))
        std::printf("best: %dx%d  t=%.6f s\n", b.m1, b.m2, b.t_mean);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "sweep report: %s\n", e.what());
    }
  }
  return all_pass ? 0 : 1;
}
