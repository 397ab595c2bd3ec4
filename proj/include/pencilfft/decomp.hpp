#ifndef PENCILFFT_DECOMP_HPP_
#define PENCILFFT_DECOMP_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pencilfft {

/// Dimensions of the global 3D data grid. Also used to index per-axis arrays.
enum class Axis : int { X = 0, Y = 1, Z = 2 };

/// Pencil orientation: which axis is entirely local to one rank.
enum class Pencil : int { X = 0, Y = 1, Z = 2 };

/// Element kind held by a local array.
enum class Elem : int { Real = 0, Complex = 1 };

const char* to_string(Axis a);
const char* to_string(Pencil p);

/**
 * Global 3D data-grid dimensions plus the derived half-spectrum size
 * nc = nx/2 + 1 (complex modes retained along X after the real-to-complex
 * transform).
 *
 * Constraints enforced at construction:
 *  - nx, ny, nz >= 2
 *  - nx even (so nc is integral)
 *  - every dimension factors into {2, 3, 5} only (kernel radix support)
 */
struct GlobalGrid {
  int nx = 0;
  int ny = 0;
  int nz = 0;
  int nc = 0;  ///< nx/2 + 1

  GlobalGrid(int nx_, int ny_, int nz_);

  int dim(Axis a) const {
    return a == Axis::X ? nx : (a == Axis::Y ? ny : nz);
  }
  std::int64_t volume() const {
    return std::int64_t(nx) * ny * nz;
  }
  /// Element count of the half spectrum: nc * ny * nz.
  std::int64_t spectral_volume() const {
    return std::int64_t(nc) * ny * nz;
  }
  bool operator==(const GlobalGrid&) const = default;
};

/// True if n > 0 and n has no prime factor other than 2, 3, 5.
bool is_radix_supported(int n);

/**
 * Virtual 2D processor grid of m1 x m2 = P ranks.
 *
 * Rank map (column-major over the virtual grid): row = rank mod m1,
 * col = rank div m1, so consecutive ranks fill a ROW group first.
 * A ROW group is the m1 ranks sharing a column coordinate; a COLUMN
 * group is the m2 ranks sharing a row coordinate.
 */
struct ProcGrid {
  int m1 = 1;
  int m2 = 1;

  int size() const { return m1 * m2; }
  int row_of(int rank) const { return rank % m1; }
  int col_of(int rank) const { return rank / m1; }
  int rank_of(int row, int col) const { return col * m1 + row; }
  bool operator==(const ProcGrid&) const = default;
};

/**
 * Balanced block partition of [0, n) into m contiguous parts.
 * The first (n mod m) parts hold ceil(n/m) elements, the rest floor(n/m).
 */
struct Partition1D {
  int n = 0;
  int m = 0;
  std::vector<int> starts;
  std::vector<int> counts;

  /// Index of the part owning global index g (g in [0, n)).
  int part_of(int g) const;
  bool operator==(const Partition1D&) const = default;
};

/// Throws std::invalid_argument unless n >= m >= 1.
Partition1D partition(int n, int m);

/**
 * Checks the processor-grid feasibility constraints against a grid:
 *   m1 * m2 = P,  m1 <= min(nc, ny),  m2 <= min(ny, nz).
 * Returns an empty vector when the grid is valid; otherwise one message
 * per violated constraint.
 */
std::vector<std::string> validate_procgrid(const GlobalGrid& grid,
                                           const ProcGrid& pg);

/**
 * Shape of one rank's local array for a given pencil orientation.
 *
 * `extent` and `offset` are indexed by Axis (data dimensions), independent
 * of memory order. `order` lists the axes fastest-varying first; shape()
 * gives the extents (L1, L2, L3) in that storage order.
 */
struct PencilLayout {
  Pencil pencil = Pencil::X;
  Elem elem = Elem::Real;
  std::array<Axis, 3> order{Axis::X, Axis::Y, Axis::Z};
  std::array<int, 3> extent{0, 0, 0};  ///< local extent per axis
  std::array<int, 3> offset{0, 0, 0};  ///< global start per axis

  int extent_of(Axis a) const { return extent[static_cast<int>(a)]; }
  int offset_of(Axis a) const { return offset[static_cast<int>(a)]; }

  /// Local extents in storage order, fastest first.
  std::array<int, 3> shape() const;
  /// Linear stride of one step along axis `a`.
  std::size_t stride(Axis a) const;
  std::size_t volume() const;

  /// Linear index of local per-axis coordinates (lx, ly, lz).
  std::size_t at(int lx, int ly, int lz) const;
  /// Inverse of at(): local per-axis coordinates of a linear index.
  std::array<int, 3> coords_of(std::size_t linear) const;

  bool operator==(const PencilLayout&) const = default;
};

/**
 * Local layout of `rank` for the requested pencil.
 *
 * Extents and distributed-dimension assignment:
 *   X-pencil: X local (nx, real); Y split over rows (m1), Z over columns (m2)
 *   Y-pencil: Y local (ny, complex); X modes (nc) split over rows, Z over columns
 *   Z-pencil: Z local (nz, complex); X modes split over rows, Y over columns
 * Storage order with stride1: XYZ / YXZ / ZYX; without: XYZ for all three.
 *
 * Throws std::invalid_argument if validate_procgrid reports violations.
 */
PencilLayout layout(const GlobalGrid& grid, const ProcGrid& pg, int rank,
                    Pencil pencil, bool stride1);

/**
 * Layout of the complex X-pencil holding the nc retained modes right after
 * the X-direction real-to-complex stage (X local, storage XYZ, same Y/Z
 * distribution as the real X-pencil).
 */
PencilLayout complex_x_layout(const GlobalGrid& grid, const ProcGrid& pg,
                              int rank);

/// Owner rank and local linear index of one global coordinate.
struct OwnerLoc {
  int rank = 0;
  std::size_t index = 0;
  bool operator==(const OwnerLoc&) const = default;
};

/**
 * Which rank owns global coordinate (gx, gy, gz) in the given pencil
 * distribution, and at which local linear index. For Y/Z pencils gx is a
 * mode index in [0, nc); for the X-pencil it is a sample index in [0, nx).
 */
OwnerLoc owner_of(const GlobalGrid& grid, const ProcGrid& pg, Pencil pencil,
                  bool stride1, int gx, int gy, int gz);

/// Same lookup for the complex X-pencil (gx in [0, nc)).
OwnerLoc owner_of_complex_x(const GlobalGrid& grid, const ProcGrid& pg,
                            int gx, int gy, int gz);

}  // namespace pencilfft

#endif  // PENCILFFT_DECOMP_HPP_
