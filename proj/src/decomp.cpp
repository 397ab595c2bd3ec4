#include "pencilfft/decomp.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace pencilfft {

const char* to_string(Axis a) {
  switch (a) {
    case Axis::X: return "X";
    case Axis::Y: return "Y";
    default: return "Z";
  }
}

const char* to_string(Pencil p) {
  switch (p) {
    case Pencil::X: return "X";
    case Pencil::Y: return "Y";
    default: return "Z";
  }
}

bool is_radix_supported(int n) {
  if (n < 1) return false;
  for (int r : {2, 3, 5})
    while (n % r == 0) n /= r;
  return n == 1;
}

GlobalGrid::GlobalGrid(int nx_, int ny_, int nz_)
    : nx(nx_), ny(ny_), nz(nz_) {
  if (nx < 2 || ny < 2 || nz < 2)
    throw std::invalid_argument("GlobalGrid: all dimensions must be >= 2");
  if (nx % 2 != 0)
    throw std::invalid_argument("GlobalGrid: nx must be even");
  for (int d : {nx, ny, nz})
    if (!is_radix_supported(d))
      throw std::invalid_argument(
          "GlobalGrid: dimension " + std::to_string(d) +
          " has a prime factor other than 2, 3, 5");
  nc = nx / 2 + 1;
}

Partition1D partition(int n, int m) {
  if (m < 1 || n < m)
    throw std::invalid_argument("partition: need n >= m >= 1, got n=" +
                                std::to_string(n) + " m=" + std::to_string(m));
  Partition1D p;
  p.n = n;
  p.m = m;
  p.starts.resize(m);
  p.counts.resize(m);
  const int base = n / m;
  const int extra = n % m;  // first `extra` parts get one more element
  int start = 0;
  for (int i = 0; i < m; ++i) {
    p.starts[i] = start;
    p.counts[i] = base + (i < extra ? 1 : 0);
    start += p.counts[i];
  }
  return p;
}

int Partition1D::part_of(int g) const {
  if (g < 0 || g >= n)
    throw std::out_of_range("Partition1D::part_of: index out of range");
  // parts are sorted by start; upper_bound on starts
  auto it = std::upper_bound(starts.begin(), starts.end(), g);
  return int(it - starts.begin()) - 1;
}

std::vector<std::string> validate_procgrid(const GlobalGrid& grid,
                                           const ProcGrid& pg) {
  std::vector<std::string> violations;
  auto fail = [&](const std::string& msg) { violations.push_back(msg); };

  if (pg.m1 < 1 || pg.m2 < 1) {
    fail("procgrid dimensions must be positive: m1=" + std::to_string(pg.m1) +
         " m2=" + std::to_string(pg.m2));
    return violations;
  }
  const int lim1 = std::min(grid.nc, grid.ny);
  const int lim2 = std::min(grid.ny, grid.nz);
  if (pg.m1 > lim1)
    fail("m1 = " + std::to_string(pg.m1) + " exceeds min(nc, ny) = " +
         std::to_string(lim1));
  if (pg.m2 > lim2)
    fail("m2 = " + std::to_string(pg.m2) + " exceeds min(ny, nz) = " +
         std::to_string(lim2));
  return violations;
}

std::array<int, 3> PencilLayout::shape() const {
  return {extent_of(order[0]), extent_of(order[1]), extent_of(order[2])};
}

std::size_t PencilLayout::stride(Axis a) const {
  const auto s = shape();
  if (a == order[0]) return 1;
  if (a == order[1]) return std::size_t(s[0]);
  return std::size_t(s[0]) * s[1];
}

std::size_t PencilLayout::volume() const {
  const auto s = shape();
  return std::size_t(s[0]) * s[1] * s[2];
}

std::size_t PencilLayout::at(int lx, int ly, int lz) const {
  const std::array<int, 3> c{lx, ly, lz};
  std::size_t idx = 0;
  for (int a = 0; a < 3; ++a)
    idx += std::size_t(c[a]) * stride(static_cast<Axis>(a));
  return idx;
}

std::array<int, 3> PencilLayout::coords_of(std::size_t linear) const {
  const auto s = shape();
  std::array<int, 3> in_order{int(linear % s[0]), int(linear / s[0] % s[1]),
                              int(linear / (std::size_t(s[0]) * s[1]))};
  std::array<int, 3> c{};
  for (int k = 0; k < 3; ++k) c[static_cast<int>(order[k])] = in_order[k];
  return c;
}

namespace {

void require_valid(const GlobalGrid& grid, const ProcGrid& pg, int rank) {
  auto v = validate_procgrid(grid, pg);
  if (!v.empty()) {
    std::ostringstream os;
    os << "invalid processor grid:";
    for (const auto& s : v) os << " [" << s << "]";
    throw std::invalid_argument(os.str());
  }
  if (rank < 0 || rank >= pg.size())
    throw std::invalid_argument("rank " + std::to_string(rank) +
                                " out of range for P = " +
                                std::to_string(pg.size()));
}

void assign(PencilLayout& l, Axis a, int ext, int off) {
  l.extent[static_cast<int>(a)] = ext;
  l.offset[static_cast<int>(a)] = off;
}

}  // namespace

PencilLayout layout(const GlobalGrid& grid, const ProcGrid& pg, int rank,
                    Pencil pencil, bool stride1) {
  require_valid(grid, pg, rank);
  const int row = pg.row_of(rank);
  const int col = pg.col_of(rank);

  PencilLayout l;
  l.pencil = pencil;
  switch (pencil) {
    case Pencil::X: {
      // real input pencil: X local, Y over rows, Z over columns
      l.elem = Elem::Real;
      l.order = {Axis::X, Axis::Y, Axis::Z};
      const auto py = partition(grid.ny, pg.m1);
      const auto pz = partition(grid.nz, pg.m2);
      assign(l, Axis::X, grid.nx, 0);
      assign(l, Axis::Y, py.counts[row], py.starts[row]);
      assign(l, Axis::Z, pz.counts[col], pz.starts[col]);
      break;
    }
    case Pencil::Y: {
      l.elem = Elem::Complex;
      l.order = stride1 ? std::array{Axis::Y, Axis::X, Axis::Z}
                        : std::array{Axis::X, Axis::Y, Axis::Z};
      const auto pc = partition(grid.nc, pg.m1);
      const auto pz = partition(grid.nz, pg.m2);
      assign(l, Axis::X, pc.counts[row], pc.starts[row]);
      assign(l, Axis::Y, grid.ny, 0);
      assign(l, Axis::Z, pz.counts[col], pz.starts[col]);
      break;
    }
    case Pencil::Z: {
      l.elem = Elem::Complex;
      l.order = stride1 ? std::array{Axis::Z, Axis::Y, Axis::X}
                        : std::array{Axis::X, Axis::Y, Axis::Z};
      const auto pc = partition(grid.nc, pg.m1);
      const auto py = partition(grid.ny, pg.m2);
      assign(l, Axis::X, pc.counts[row], pc.starts[row]);
      assign(l, Axis::Y, py.counts[col], py.starts[col]);
      assign(l, Axis::Z, grid.nz, 0);
      break;
    }
  }
  return l;
}

PencilLayout complex_x_layout(const GlobalGrid& grid, const ProcGrid& pg,
                              int rank) {
  PencilLayout l = layout(grid, pg, rank, Pencil::X, false);
  l.elem = Elem::Complex;
  assign(l, Axis::X, grid.nc, 0);
  return l;
}

namespace {

OwnerLoc owner_from_layoutfn(const GlobalGrid& grid, const ProcGrid& pg,
                             int gx, int gy, int gz, Pencil pencil,
                             bool stride1, bool complex_x) {
  // Locate the owning (row, col) from the per-axis partitions, then map
  // global to local coordinates through that rank's layout.
  int row = 0, col = 0;
  switch (pencil) {
    case Pencil::X:
      row = partition(grid.ny, pg.m1).part_of(gy);
      col = partition(grid.nz, pg.m2).part_of(gz);
      break;
    case Pencil::Y:
      row = partition(grid.nc, pg.m1).part_of(gx);
      col = partition(grid.nz, pg.m2).part_of(gz);
      break;
    case Pencil::Z:
      row = partition(grid.nc, pg.m1).part_of(gx);
      col = partition(grid.ny, pg.m2).part_of(gy);
      break;
  }
  const int rank = pg.rank_of(row, col);
  const PencilLayout l = complex_x
                             ? complex_x_layout(grid, pg, rank)
                             : layout(grid, pg, rank, pencil, stride1);
  return OwnerLoc{rank, l.at(gx - l.offset_of(Axis::X), gy - l.offset_of(Axis::Y),
                             gz - l.offset_of(Axis::Z))};
}

}  // namespace

OwnerLoc owner_of(const GlobalGrid& grid, const ProcGrid& pg, Pencil pencil,
                  bool stride1, int gx, int gy, int gz) {
  return owner_from_layoutfn(grid, pg, gx, gy, gz, pencil, stride1, false);
}

OwnerLoc owner_of_complex_x(const GlobalGrid& grid, const ProcGrid& pg,
                            int gx, int gy, int gz) {
  return owner_from_layoutfn(grid, pg, gx, gy, gz, Pencil::X, false, true);
}

}  // namespace pencilfft
