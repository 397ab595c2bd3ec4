#ifndef PENCILFFT_BENCH_HPP_
#define PENCILFFT_BENCH_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pencilfft/plan.hpp"

namespace pencilfft::bench {

/// How the virtual processor grid is chosen for a given rank count.
enum class GridMode {
  Explicit,  ///< use (m1, m2) as given
  Sweep,     ///< run every factorization m1 * m2 = P
  Auto,      ///< smallest divisor of P >= cores_per_node becomes m1
};

struct BenchConfig {
  int nx = 16, ny = 16, nz = 16;
  int ranks = 1;
  GridMode mode = GridMode::Auto;
  int m1 = 1, m2 = 1;      ///< Explicit mode
  int cores_per_node = 1;  ///< Auto mode
  bool stride1 = false;
  bool useeven = false;
  ThirdKind third = ThirdKind::Fft;
  int iters = 1;
  int warmup = 1;
  std::uint64_t seed = 12345;  ///< random field of the oracle cross-check
  bool oracle = false;  ///< run the serial reference transform (grids <= 32^3)
  int cache_block = 32;
};

/// Result of one timed configuration point.
struct BenchRecord {
  int nx = 0, ny = 0, nz = 0;
  int p = 1, m1 = 1, m2 = 1;
  bool stride1 = false, useeven = false;
  ThirdKind third = ThirdKind::Fft;
  int iters = 1;
  double t_mean = 0, t_min = 0, t_max = 0;  ///< seconds per fwd+bwd pair
  double t_comm_mean = 0;                   ///< seconds inside exchanges
  double max_rel_err = 0;
  bool pass = false;
  double flops = 0;
  std::string note;  ///< failure reason; not part of the CSV
};

/// f(x,y,z) = sin(2 pi x / nx) sin(2 pi y / ny) sin(2 pi z / nz) sampled at
/// the rank's global coordinates. Its spectrum is analytically sparse, which
/// keeps the round-trip check sharp.
RealField init_sine(const GlobalGrid& grid, const PencilLayout& layout);

/**
 * Runs the benchmark: for each processor grid of the configured mode,
 * `warmup` untimed and `iters` timed forward+backward pairs over the sine
 * field, followed by the round-trip correctness check (pass iff the
 * relative error stays below 1e-10). Configuration points that fail
 * validation produce failed records instead of stopping the sweep.
 */
std::vector<BenchRecord> run(const BenchConfig& config);

/**
 * Best (m1, m2) per (grid, P, flags) group among passing records: minimum
 * mean time, ties broken toward smaller m1. Throws if a group has no
 * passing record.
 */
std::vector<BenchRecord> sweep_report(const std::vector<BenchRecord>& records);

/// Schema: nx,ny,nz,P,m1,m2,stride1,useeven,third,iters,t_mean,t_min,t_max,
/// t_comm_mean,max_rel_err,pass,flops_rate
std::string csv_header();
void write_csv(std::ostream& out, const std::vector<BenchRecord>& records);

/// Appends to `path`, writing the header first when the file is new/empty.
void append_csv(const std::string& path,
                const std::vector<BenchRecord>& records);

}  // namespace pencilfft::bench

#endif  // PENCILFFT_BENCH_HPP_
