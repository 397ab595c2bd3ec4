#ifndef PENCILFFT_PLAN_HPP_
#define PENCILFFT_PLAN_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "pencilfft/decomp.hpp"
#include "pencilfft/kernels.hpp"
#include "pencilfft/procgroup.hpp"
#include "pencilfft/remap.hpp"

namespace pencilfft {

/// Transform applied along Z: FFT, Chebyshev, or a pass-through that still
/// performs the redistributions (for user-substituted transforms).
enum class ThirdKind { Fft, Cheb, Empty };

const char* to_string(ThirdKind k);

struct PlanFlags {
  bool stride1 = false;
  bool useeven = false;
  ThirdKind third = ThirdKind::Fft;
  int cache_block = 32;
};

/// Wall time spent inside the all-to-all exchange calls.
struct TransformStats {
  double comm_seconds = 0.0;
};

/// Local real array plus its pencil layout.
struct RealField {
  PencilLayout layout;
  std::vector<double> data;

  double& at(int lx, int ly, int lz) { return data[layout.at(lx, ly, lz)]; }
  double at(int lx, int ly, int lz) const {
    return data[layout.at(lx, ly, lz)];
  }
};

/// Local complex array plus its pencil layout.
struct ComplexField {
  PencilLayout layout;
  std::vector<Complex> data;

  Complex& at(int lx, int ly, int lz) { return data[layout.at(lx, ly, lz)]; }
  Complex at(int lx, int ly, int lz) const {
    return data[layout.at(lx, ly, lz)];
  }
};

/**
 * Precomputed driver for the 3D transform of one rank: pencil layouts,
 * remap schedules, kernel setups and scratch buffers for one
 * (grid, procgrid, flags) combination.
 *
 * The forward transform takes real X-pencil input to complex Z-pencil
 * output (no transpose back); backward reverses the pipeline exactly.
 * Creation is pure per-rank computation; forward/backward are collective
 * across the processor grid, so all ranks must call them in matching order
 * with their row/column groups from split().
 *
 * Nothing normalizes: with an FFT third stage backward(forward(f)) equals
 * nx*ny*nz*f. The Chebyshev pair is self-inverse, so that round trip (and
 * the Empty one) scales by nx*ny only.
 */
class Plan {
 public:
  Plan(const GlobalGrid& grid, const ProcGrid& pg, int rank);
  Plan(const GlobalGrid& grid, const ProcGrid& pg, int rank, PlanFlags flags);

  const GlobalGrid& grid() const { return grid_; }
  const ProcGrid& procgrid() const { return pg_; }
  int rank() const { return rank_; }
  const PlanFlags& flags() const { return flags_; }

  /// Real X-pencil accepted by forward / produced by backward.
  const PencilLayout& input_layout() const { return in_layout_; }
  /// Complex Z-pencil produced by forward / accepted by backward.
  const PencilLayout& output_layout() const { return out_layout_; }
  const RemapSchedule& schedule(Stage stage) const;

  RealField make_input() const;
  ComplexField make_output() const;

  void forward(Group& row, Group& col, const RealField& in, ComplexField& out,
               TransformStats* stats = nullptr);
  void backward(Group& row, Group& col, const ComplexField& in, RealField& out,
                TransformStats* stats = nullptr);

  /// Out-of-place over raw storage; input and output must not overlap.
  void forward(Group& row, Group& col, std::span<const double> in,
               std::span<Complex> out, TransformStats* stats = nullptr);
  void backward(Group& row, Group& col, std::span<const Complex> in,
                std::span<double> out, TransformStats* stats = nullptr);

  /// Required length (in doubles) of an in-place buffer: enough for the
  /// real input and for the complex output stored as interleaved doubles.
  std::size_t inplace_doubles() const;

  /// In-place transforms over one buffer of at least inplace_doubles()
  /// doubles; semantics identical to the out-of-place calls.
  void forward_inplace(Group& row, Group& col, std::span<double> buf,
                       TransformStats* stats = nullptr);
  void backward_inplace(Group& row, Group& col, std::span<double> buf,
                        TransformStats* stats = nullptr);

 private:
  void run_remap(const RemapSchedule& s, Group& group, const Complex* src,
                 Complex* dst, TransformStats* stats);
  void apply_y(Direction dir);
  void apply_z(Complex* data, Direction dir);
  void forward_core(Group& row, Group& col, const double* in, Complex* out,
                    TransformStats* stats);
  void backward_core(Group& row, Group& col, double* out,
                     TransformStats* stats);
  void check_hermitian(const std::vector<Complex>& zdata, Group& col);

  GlobalGrid grid_;
  ProcGrid pg_;
  int rank_;
  PlanFlags flags_;

  PencilLayout in_layout_;   // real X-pencil
  PencilLayout cx_layout_;   // complex X-pencil (retained modes)
  PencilLayout y_layout_;
  PencilLayout out_layout_;  // Z-pencil

  RemapSchedule sched_xy_, sched_yz_, sched_zy_, sched_yx_;

  KernelSetup kx_fwd_;  // R2C, length nx
  KernelSetup kx_bwd_;  // C2R, length nx
  KernelSetup ky_;      // C2C, length ny
  KernelSetup kz_;      // C2C / Cos / Empty, length nz

  std::vector<Complex> sx_;    // complex X-pencil stage
  std::vector<Complex> ybuf_;  // Y-pencil stage
  std::vector<Complex> zbuf_;  // Z-pencil stage (backward input / in-place)
  std::vector<Complex> send_, recv_;
};

}  // namespace pencilfft

#endif  // PENCILFFT_PLAN_HPP_
