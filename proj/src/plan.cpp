#include "pencilfft/plan.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>

namespace pencilfft {

const char* to_string(ThirdKind k) {
  switch (k) {
    case ThirdKind::Fft: return "fft";
    case ThirdKind::Cheb: return "cheb";
    default: return "empty";
  }
}

namespace {

Kind third_kernel_kind(ThirdKind k) {
  switch (k) {
    case ThirdKind::Fft: return Kind::C2C;
    case ThirdKind::Cheb: return Kind::Cos;
    default: return Kind::Empty;
  }
}

bool ranges_overlap(const void* a, std::size_t a_bytes, const void* b,
                    std::size_t b_bytes) {
  const auto lo_a = reinterpret_cast<std::uintptr_t>(a);
  const auto lo_b = reinterpret_cast<std::uintptr_t>(b);
  return lo_a < lo_b + b_bytes && lo_b < lo_a + a_bytes;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

Plan::Plan(const GlobalGrid& grid, const ProcGrid& pg, int rank)
    : Plan(grid, pg, rank, PlanFlags{}) {}

Plan::Plan(const GlobalGrid& grid, const ProcGrid& pg, int rank,
           PlanFlags flags)
    : grid_(grid),
      pg_(pg),
      rank_(rank),
      flags_(flags),
      in_layout_(layout(grid, pg, rank, Pencil::X, flags.stride1)),
      cx_layout_(complex_x_layout(grid, pg, rank)),
      y_layout_(layout(grid, pg, rank, Pencil::Y, flags.stride1)),
      out_layout_(layout(grid, pg, rank, Pencil::Z, flags.stride1)),
      sched_xy_(build_schedule(grid, pg, rank, Stage::XtoY, flags.stride1,
                               flags.useeven, flags.cache_block)),
      sched_yz_(build_schedule(grid, pg, rank, Stage::YtoZ, flags.stride1,
                               flags.useeven, flags.cache_block)),
      sched_zy_(build_schedule(grid, pg, rank, Stage::ZtoY, flags.stride1,
                               flags.useeven, flags.cache_block)),
      sched_yx_(build_schedule(grid, pg, rank, Stage::YtoX, flags.stride1,
                               flags.useeven, flags.cache_block)),
      kx_fwd_(Kind::R2C, grid.nx),
      kx_bwd_(Kind::C2R, grid.nx),
      ky_(Kind::C2C, grid.ny),
      kz_(third_kernel_kind(flags.third), grid.nz) {
  sx_.resize(cx_layout_.volume());
  ybuf_.resize(y_layout_.volume());
  zbuf_.resize(out_layout_.volume());
  std::size_t xfer = 0;
  for (const auto* s : {&sched_xy_, &sched_yz_, &sched_zy_, &sched_yx_})
    xfer = std::max({xfer, s->send_elems, s->recv_elems});
  send_.resize(xfer);
  recv_.resize(xfer);
}

const RemapSchedule& Plan::schedule(Stage stage) const {
  switch (stage) {
    case Stage::XtoY: return sched_xy_;
    case Stage::YtoZ: return sched_yz_;
    case Stage::ZtoY: return sched_zy_;
    default: return sched_yx_;
  }
}

RealField Plan::make_input() const {
  return RealField{in_layout_, std::vector<double>(in_layout_.volume())};
}

ComplexField Plan::make_output() const {
  return ComplexField{out_layout_,
                      std::vector<Complex>(out_layout_.volume())};
}

void Plan::run_remap(const RemapSchedule& s, Group& group, const Complex* src,
                     Complex* dst, TransformStats* stats) {
  pack(s, std::span<const Complex>(src, s.src.volume()),
       std::span<Complex>(send_.data(), s.send_elems));
  const double t0 = stats ? now_seconds() : 0.0;
  exchange(s, group, std::span<const Complex>(send_.data(), s.send_elems),
           std::span<Complex>(recv_.data(), s.recv_elems));
  if (stats) stats->comm_seconds += now_seconds() - t0;
  unpack(s, std::span<const Complex>(recv_.data(), s.recv_elems),
         std::span<Complex>(dst, s.dst.volume()));
}

void Plan::apply_y(Direction dir) {
  const int ny = grid_.ny;
  if (flags_.stride1) {
    ky_.batched(ybuf_.data(), ybuf_.size() / ny, 1, ny, dir);
    return;
  }
  // XYZ storage: Y lines are strided by the local X extent, one slab per z
  const int lx = y_layout_.extent_of(Axis::X);
  const int lz = y_layout_.extent_of(Axis::Z);
  for (int z = 0; z < lz; ++z)
    ky_.batched(ybuf_.data() + std::size_t(z) * lx * ny, lx, lx, 1, dir);
}

void Plan::apply_z(Complex* data, Direction dir) {
  const int nz = grid_.nz;
  const std::size_t vol = out_layout_.volume();
  if (flags_.stride1) {
    kz_.batched(data, vol / nz, 1, nz, dir);
  } else {
    const std::size_t plane = vol / nz;  // local X times local Y
    kz_.batched(data, plane, plane, 1, dir);
  }
}

void Plan::forward_core(Group& row, Group& col, const double* in, Complex* out,
                        TransformStats* stats) {
  const std::size_t lines = in_layout_.volume() / grid_.nx;
  kx_fwd_.batched_r2c(in, 1, grid_.nx, sx_.data(), 1, grid_.nc, lines);
  run_remap(sched_xy_, row, sx_.data(), ybuf_.data(), stats);
  apply_y(Direction::Forward);
  run_remap(sched_yz_, col, ybuf_.data(), out, stats);
  apply_z(out, Direction::Forward);
}

void Plan::backward_core(Group& row, Group& col, double* out,
                         TransformStats* stats) {
  // zbuf_ holds the caller's spectrum on entry
  check_hermitian(zbuf_, col);
  apply_z(zbuf_.data(), Direction::Backward);
  run_remap(sched_zy_, col, zbuf_.data(), ybuf_.data(), stats);
  apply_y(Direction::Backward);
  run_remap(sched_yx_, row, ybuf_.data(), sx_.data(), stats);
  const std::size_t lines = in_layout_.volume() / grid_.nx;
  kx_bwd_.batched_c2r(sx_.data(), 1, grid_.nc, out, 1, grid_.nx, lines);
}

void Plan::forward(Group& row, Group& col, std::span<const double> in,
                   std::span<Complex> out, TransformStats* stats) {
  if (in.size() != in_layout_.volume())
    throw std::invalid_argument("forward: input size does not match the "
                                "X-pencil layout");
  if (out.size() != out_layout_.volume())
    throw std::invalid_argument("forward: output size does not match the "
                                "Z-pencil layout");
  if (ranges_overlap(in.data(), in.size_bytes(), out.data(),
                     out.size_bytes()))
    throw std::invalid_argument(
        "forward: input and output buffers overlap; use the in-place entry "
        "point instead");
  for (double v : in)
    if (!std::isfinite(v))
      throw std::invalid_argument("forward: non-finite input sample");
  forward_core(row, col, in.data(), out.data(), stats);
}

void Plan::backward(Group& row, Group& col, std::span<const Complex> in,
                    std::span<double> out, TransformStats* stats) {
  if (in.size() != out_layout_.volume())
    throw std::invalid_argument("backward: input size does not match the "
                                "Z-pencil layout");
  if (out.size() != in_layout_.volume())
    throw std::invalid_argument("backward: output size does not match the "
                                "X-pencil layout");
  if (ranges_overlap(in.data(), in.size_bytes(), out.data(),
                     out.size_bytes()))
    throw std::invalid_argument(
        "backward: input and output buffers overlap; use the in-place entry "
        "point instead");
  std::copy(in.begin(), in.end(), zbuf_.begin());
  backward_core(row, col, out.data(), stats);
}

void Plan::forward(Group& row, Group& col, const RealField& in,
                   ComplexField& out, TransformStats* stats) {
  if (in.layout != in_layout_)
    throw std::invalid_argument("forward: field layout mismatch");
  if (out.data.empty())
    out = make_output();
  else if (out.layout != out_layout_)
    throw std::invalid_argument("forward: output field layout mismatch");
  forward(row, col, std::span<const double>(in.data),
          std::span<Complex>(out.data), stats);
}

void Plan::backward(Group& row, Group& col, const ComplexField& in,
                    RealField& out, TransformStats* stats) {
  if (in.layout != out_layout_)
    throw std::invalid_argument("backward: field layout mismatch");
  if (out.data.empty())
    out = make_input();
  else if (out.layout != in_layout_)
    throw std::invalid_argument("backward: output field layout mismatch");
  backward(row, col, std::span<const Complex>(in.data),
           std::span<double>(out.data), stats);
}

std::size_t Plan::inplace_doubles() const {
  return std::max(in_layout_.volume(), 2 * out_layout_.volume());
}

void Plan::forward_inplace(Group& row, Group& col, std::span<double> buf,
                           TransformStats* stats) {
  if (buf.size() < inplace_doubles())
    throw std::invalid_argument(
        "forward_inplace: buffer holds " + std::to_string(buf.size()) +
        " doubles, need " + std::to_string(inplace_doubles()));
  for (std::size_t i = 0; i < in_layout_.volume(); ++i)
    if (!std::isfinite(buf[i]))
      throw std::invalid_argument("forward: non-finite input sample");
  forward_core(row, col, buf.data(), zbuf_.data(), stats);
  std::memcpy(buf.data(), reinterpret_cast<const double*>(zbuf_.data()),
              out_layout_.volume() * sizeof(Complex));
}

void Plan::backward_inplace(Group& row, Group& col, std::span<double> buf,
                            TransformStats* stats) {
  if (buf.size() < inplace_doubles())
    throw std::invalid_argument(
        "backward_inplace: buffer holds " + std::to_string(buf.size()) +
        " doubles, need " + std::to_string(inplace_doubles()));
  std::memcpy(reinterpret_cast<double*>(zbuf_.data()), buf.data(),
              out_layout_.volume() * sizeof(Complex));
  backward_core(row, col, buf.data(), stats);
}

/* Backward precondition: the kx = 0 and kx = nx/2 planes of the input
   spectrum carry their own conjugate structure when the output is real.
   The owning ranks assemble the full plane within their COLUMN group (the
   plane is split along Y only) and verify F(ky, kz) = conj(F(-ky, pz))
   where pz = -kz for an FFT third stage and pz = kz otherwise (Chebyshev
   and empty transforms act along Z with real coefficients). */
void Plan::check_hermitian(const std::vector<Complex>& zdata, Group& col) {
  const int ny = grid_.ny, nz = grid_.nz;
  const PencilLayout& l = out_layout_;
  const auto py = partition(ny, pg_.m2);
  for (auto [mode, owner_row] :
       {std::pair{0, 0}, std::pair{grid_.nc - 1, pg_.m1 - 1}}) {
    if (pg_.row_of(rank_) != owner_row) continue;
    const int kx_loc = mode - l.offset_of(Axis::X);
    const int ly = l.extent_of(Axis::Y);

    std::vector<Complex> mine(std::size_t(ly) * nz);
    for (int y = 0; y < ly; ++y)
      for (int z = 0; z < nz; ++z)
        mine[std::size_t(y) * nz + z] = zdata[l.at(kx_loc, y, z)];

    ExchangePlan plan;
    for (int j = 0; j < pg_.m2; ++j) {
      plan.send_counts.push_back(mine.size());
      plan.send_displs.push_back(0);
      plan.recv_counts.push_back(std::size_t(py.counts[j]) * nz);
      plan.recv_displs.push_back(std::size_t(py.starts[j]) * nz);
    }
    std::vector<Complex> plane(std::size_t(ny) * nz);
    col.alltoall_varying(std::span<const Complex>(mine),
                         std::span<Complex>(plane), plan);

    double scale = 0.0;
    for (const Complex& v : plane) scale = std::max(scale, std::abs(v));
    const double tol = 1e-10 * scale;
    for (int gy = 0; gy < ny; ++gy)
      for (int gz = 0; gz < nz; ++gz) {
        const int pz = flags_.third == ThirdKind::Fft ? (nz - gz) % nz : gz;
        const Complex a = plane[std::size_t(gy) * nz + gz];
        const Complex b =
            std::conj(plane[std::size_t((ny - gy) % ny) * nz + pz]);
        if (std::abs(a - b) > tol)
          throw std::invalid_argument(
              "backward: spectrum is not Hermitian-consistent at the kx = " +
              std::to_string(mode) + " plane");
      }
  }
}

}  // namespace pencilfft
