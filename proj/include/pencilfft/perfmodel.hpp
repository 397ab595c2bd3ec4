#ifndef PENCILFFT_PERFMODEL_HPP_
#define PENCILFFT_PERFMODEL_HPP_

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pencilfft/decomp.hpp"

namespace pencilfft::model {

/**
 * Machine parameters of the execution-time model
 *
 *   T(N, P) = N^3 [ 2.5 log2(N) / (P F)
 *                 + b m / (P sigma_mem)
 *                 + c m / (2 sigma_bi(P)) ]
 *
 * compute, memory and network terms in that order. All logs here are
 * base 2, matching FFT operation counting.
 */
struct ModelParams {
  double flops_per_sec = 1e9;        ///< F: per-rank floating-point rate
  double mem_accesses_per_elem = 1;  ///< b
  double mem_bytes_per_sec = 1e9;    ///< sigma_mem, per rank
  double contention = 1;             ///< c
  double elem_bytes = 16;            ///< m
  /// sigma_bi: bisection bandwidth (bytes/s) of the partition running P
  /// ranks; on a 3D torus this grows like P^(2/3).
  std::function<double(double)> bisection_bw = [](double) { return 1e12; };
};

/// Predicted seconds for an N^3 transform unit on P ranks.
double predict(const ModelParams& params, double n, double p);

/// Coefficients of the strong-scaling law t(P) = a/P + d/P^(2/3).
struct ScalingFit {
  double a = 0;         ///< compute + memory coefficient (s * ranks)
  double d = 0;         ///< network coefficient (s * ranks^(2/3))
  double residual = 0;  ///< ||t - fit|| / ||t||
};

/// One benchmark measurement: P ranks over an (nx, ny, nz) grid, seconds
/// per timed unit (total and inside exchanges).
struct TimingSample {
  int p = 1;
  int nx = 0, ny = 0, nz = 0;
  double t_total = 0;
  double t_comm = 0;

  double ntot() const { return double(nx) * ny * nz; }
};

/**
 * Nonnegative least squares of (p, t) pairs onto {1/P, 1/P^(2/3)}.
 * Exact on model-generated data. Needs at least two distinct P values and
 * a nonzero time vector.
 */
ScalingFit fit_strong_scaling(const std::vector<std::pair<double, double>>& pt);

/// Fit of t_total (or t_comm) across samples, which must share one grid.
ScalingFit fit_strong_scaling(const std::vector<TimingSample>& samples,
                              bool comm_time = false);

/**
 * Effective bisection bandwidth implied by a fitted network coefficient d:
 * each transpose moves m * N^3 bytes of which half crosses the bisection,
 * so with `transposes` of them per timed unit
 *
 *   sigma_eff = transposes * m * ntot / (2 * d / P^(2/3)).
 *
 * Contention is absorbed: this inverts the model's network term to
 * sigma_bi(P) / c.
 */
double effective_bandwidth(double d, double ntot, double elem_bytes, double p,
                           int transposes);

/// sigma_eff over the theoretical peak, e.g. 212 GB/s of 3686.4 GB/s.
double network_efficiency(double sigma_eff, double sigma_peak);

/**
 * Weak-scaling efficiency of each sample against a base sample, with work
 * counted as Ntot * log2(Ntot):
 *
 *   eff = (work / work_base) / ((P t) / (P_base t_base)),
 *
 * so the base point always reports exactly 1.
 */
std::vector<double> weak_scaling_efficiency(
    const TimingSample& base, const std::vector<TimingSample>& samples);

/// Achieved rate for one forward+backward pair, counting
/// 2 * 2.5 * Ntot * log2(Ntot) floating-point operations.
double flops_rate(const GlobalGrid& grid, double t_pair_seconds);

// ---------------------------------------------------------------------------
// CSV interface: consumes benchmark records, emits fit reports.
// ---------------------------------------------------------------------------

/// One row of the benchmark CSV (schema: nx,ny,nz,P,m1,m2,stride1,useeven,
/// third,iters,t_mean,t_min,t_max,t_comm_mean,max_rel_err,pass,flops_rate).
struct CsvTiming {
  int nx = 0, ny = 0, nz = 0;
  int p = 1, m1 = 1, m2 = 1;
  bool stride1 = false, useeven = false;
  std::string third = "fft";
  int iters = 1;
  double t_mean = 0, t_min = 0, t_max = 0, t_comm_mean = 0;
  double max_rel_err = 0;
  bool pass = false;
  double flops = 0;

  TimingSample sample() const {
    return TimingSample{p, nx, ny, nz, t_mean, t_comm_mean};
  }
};

std::vector<CsvTiming> read_bench_csv(std::istream& in);

/// Strong-scaling fit of one grid/flag group across rank counts.
struct FitReport {
  int nx = 0, ny = 0, nz = 0;
  bool stride1 = false, useeven = false;
  std::string third = "fft";
  ScalingFit total;       ///< fit of t_mean
  ScalingFit comm;        ///< fit of t_comm_mean
  double sigma_eff = 0;   ///< from the comm coefficient, 4 transposes/pair
};

/**
 * Groups passing rows by (grid, stride1, useeven, third), keeps the best
 * (m1, m2) point per rank count, and fits each group with at least two
 * distinct P values. sigma_eff is evaluated at the group's largest P.
 */
std::vector<FitReport> fit_bench_records(const std::vector<CsvTiming>& rows,
                                         double elem_bytes = 16.0);

/// Header + one line per report: nx,ny,nz,stride1,useeven,third,a,d,
/// residual,a_comm,d_comm,residual_comm,sigma_eff.
void write_fit_report(std::ostream& out, const std::vector<FitReport>& reports);

}  // namespace pencilfft::model

#endif  // PENCILFFT_PERFMODEL_HPP_
