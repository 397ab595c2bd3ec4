#ifndef PENCILFFT_REMAP_HPP_
#define PENCILFFT_REMAP_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "pencilfft/decomp.hpp"
#include "pencilfft/kernels.hpp"
#include "pencilfft/procgroup.hpp"

namespace pencilfft {

/// The four global transposes of the transform pipeline.
enum class Stage { XtoY, YtoZ, ZtoY, YtoX };

/// Which virtual-grid subgroup hosts the exchange of a stage.
enum class GroupKind { Row, Column };

/// How peer blocks travel: per-peer counts, or one padded even block.
enum class ExchangeMode { Varying, EvenPadded };

const char* to_string(Stage s);

/// One peer's sub-box of a local array, plus its slot in the packed buffer.
/// `lo`/`count` are per-axis local coordinates (indexed by Axis).
struct PeerBlock {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> count{0, 0, 0};
  std::size_t elems = 0;
  std::size_t offset = 0;
  bool operator==(const PeerBlock&) const = default;
};

/**
 * Precomputed plan for one pencil-to-pencil transpose on one rank:
 * which sub-box of the source array goes to each subgroup peer, where each
 * peer's contribution lands in the destination array, and how the exchange
 * buffers are laid out.
 *
 * Pack blocks tile the source local array exactly, unpack blocks tile the
 * destination, and the box rank i packs for peer j covers the same global
 * coordinates peer j expects from i. Blocks are written in the destination
 * layout's storage order, so the receiver unpacks with a forward copy.
 */
struct RemapSchedule {
  Stage stage = Stage::XtoY;
  PencilLayout src;
  PencilLayout dst;
  GroupKind group_kind = GroupKind::Row;
  int peers = 1;
  int my_pos = 0;
  ExchangeMode mode = ExchangeMode::Varying;
  std::size_t pad_block = 0;   ///< EvenPadded: elements per peer slot
  std::size_t send_elems = 0;  ///< total send buffer size, padding included
  std::size_t recv_elems = 0;
  int cache_block = 32;
  std::vector<PeerBlock> pack_blocks;
  std::vector<PeerBlock> unpack_blocks;

  bool operator==(const RemapSchedule&) const = default;
};

/**
 * Builds the schedule of `stage` for one rank.
 *
 * X<->Y transposes exchange within the rank's ROW group (redistributing the
 * X modes against Y); Y<->Z transposes within its COLUMN group
 * (redistributing Y against Z). Destination layouts match decomp::layout for
 * the target pencil and stride1 flag; X-side endpoints use the complex
 * X-pencil of retained modes.
 */
RemapSchedule build_schedule(const GlobalGrid& grid, const ProcGrid& pg,
                             int rank, Stage stage, bool stride1, bool useeven,
                             int cache_block = 32);

/// Gathers the per-peer sub-boxes of `src` into the send buffer, tiled in
/// cache_block chunks. EvenPadded slots are zero-padded past the payload.
void pack(const RemapSchedule& s, std::span<const Complex> src,
          std::span<Complex> send);

/// Runs the all-to-all of the schedule inside `group` (the rank's row or
/// column group, matching s.group_kind).
void exchange(const RemapSchedule& s, Group& group,
              std::span<const Complex> send, std::span<Complex> recv);

/// Scatters received peer blocks into the destination local array.
void unpack(const RemapSchedule& s, std::span<const Complex> recv,
            std::span<Complex> dst);

}  // namespace pencilfft

#endif  // PENCILFFT_REMAP_HPP_
