#include "pencilfft/remap.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pencilfft {

const char* to_string(Stage s) {
  switch (s) {
    case Stage::XtoY: return "X->Y";
    case Stage::YtoZ: return "Y->Z";
    case Stage::ZtoY: return "Z->Y";
    default: return "Y->X";
  }
}

namespace {

int axis_count(const std::array<int, 3>& per_axis, Axis a) {
  return per_axis[static_cast<int>(a)];
}

void set_axis(std::array<int, 3>& per_axis, Axis a, int v) {
  per_axis[static_cast<int>(a)] = v;
}

struct StageSpec {
  GroupKind group;
  Axis scatter;  // full in source, split in destination
  Axis gather;   // split in source, full in destination
  Axis third;    // untouched by the exchange
};

StageSpec stage_spec(Stage stage) {
  switch (stage) {
    case Stage::XtoY:
      return {GroupKind::Row, Axis::X, Axis::Y, Axis::Z};
    case Stage::YtoX:
      return {GroupKind::Row, Axis::Y, Axis::X, Axis::Z};
    case Stage::YtoZ:
      return {GroupKind::Column, Axis::Y, Axis::Z, Axis::X};
    default:  // ZtoY
      return {GroupKind::Column, Axis::Z, Axis::Y, Axis::X};
  }
}

PencilLayout endpoint_layout(const GlobalGrid& grid, const ProcGrid& pg,
                             int rank, Stage stage, bool stride1, bool dest) {
  const Pencil p = [&] {
    switch (stage) {
      case Stage::XtoY: return dest ? Pencil::Y : Pencil::X;
      case Stage::YtoZ: return dest ? Pencil::Z : Pencil::Y;
      case Stage::ZtoY: return dest ? Pencil::Y : Pencil::Z;
      default:          return dest ? Pencil::X : Pencil::Y;
    }
  }();
  if (p == Pencil::X) return complex_x_layout(grid, pg, rank);
  return layout(grid, pg, rank, p, stride1);
}

}  // namespace

RemapSchedule build_schedule(const GlobalGrid& grid, const ProcGrid& pg,
                             int rank, Stage stage, bool stride1, bool useeven,
                             int cache_block) {
  const StageSpec spec = stage_spec(stage);

  RemapSchedule s;
  s.stage = stage;
  s.src = endpoint_layout(grid, pg, rank, stage, stride1, false);
  s.dst = endpoint_layout(grid, pg, rank, stage, stride1, true);
  s.group_kind = spec.group;
  s.peers = spec.group == GroupKind::Row ? pg.m1 : pg.m2;
  s.my_pos = spec.group == GroupKind::Row ? pg.row_of(rank) : pg.col_of(rank);
  s.mode = useeven ? ExchangeMode::EvenPadded : ExchangeMode::Varying;
  s.cache_block = std::max(1, cache_block);

  const int scatter_extent = spec.scatter == Axis::X
                                 ? grid.nc
                                 : grid.dim(spec.scatter);
  const int gather_extent = spec.gather == Axis::X
                                ? grid.nc
                                : grid.dim(spec.gather);
  const auto part_scatter = partition(scatter_extent, s.peers);
  const auto part_gather = partition(gather_extent, s.peers);

  // Peer sub-boxes. The scatter axis is fully local in the source, so a
  // peer's slice sits at its global offset; the gather axis is fully local
  // in the destination, symmetrically.
  const int src_third = s.src.extent_of(spec.third);
  const int dst_third = s.dst.extent_of(spec.third);
  s.pack_blocks.resize(s.peers);
  s.unpack_blocks.resize(s.peers);
  for (int g = 0; g < s.peers; ++g) {
    PeerBlock& pb = s.pack_blocks[g];
    set_axis(pb.lo, spec.scatter, part_scatter.starts[g]);
    set_axis(pb.count, spec.scatter, part_scatter.counts[g]);
    set_axis(pb.lo, spec.gather, 0);
    set_axis(pb.count, spec.gather, s.src.extent_of(spec.gather));
    set_axis(pb.lo, spec.third, 0);
    set_axis(pb.count, spec.third, src_third);
    pb.elems = std::size_t(pb.count[0]) * pb.count[1] * pb.count[2];

    PeerBlock& ub = s.unpack_blocks[g];
    set_axis(ub.lo, spec.scatter, 0);
    set_axis(ub.count, spec.scatter, s.dst.extent_of(spec.scatter));
    set_axis(ub.lo, spec.gather, part_gather.starts[g]);
    set_axis(ub.count, spec.gather, part_gather.counts[g]);
    set_axis(ub.lo, spec.third, 0);
    set_axis(ub.count, spec.third, dst_third);
    ub.elems = std::size_t(ub.count[0]) * ub.count[1] * ub.count[2];
  }

  // Every member's per-peer count is scatter_count * gather_count * third,
  // so the global maximum is the product of the per-partition maxima.
  const int max_scatter =
      *std::max_element(part_scatter.counts.begin(), part_scatter.counts.end());
  const int max_gather =
      *std::max_element(part_gather.counts.begin(), part_gather.counts.end());
  s.pad_block = std::size_t(max_scatter) * max_gather * src_third;

  std::size_t soff = 0, roff = 0;
  for (int g = 0; g < s.peers; ++g) {
    if (s.mode == ExchangeMode::EvenPadded) {
      s.pack_blocks[g].offset = s.pad_block * g;
      s.unpack_blocks[g].offset = s.pad_block * g;
    } else {
      s.pack_blocks[g].offset = soff;
      s.unpack_blocks[g].offset = roff;
    }
    soff += s.pack_blocks[g].elems;
    roff += s.unpack_blocks[g].elems;
  }
  if (s.mode == ExchangeMode::EvenPadded) {
    s.send_elems = s.pad_block * s.peers;
    s.recv_elems = s.pad_block * s.peers;
  } else {
    s.send_elems = soff;
    s.recv_elems = roff;
  }
  return s;
}

namespace {

// Tiled copy between a strided sub-box and its packed (linear) form, with
// the linear side enumerated in an explicit axis order (fastest first). The
// linear position of a box element is fixed by the box shape, so the tile
// size changes traversal order only, never the result.
void box_to_linear(const Complex* arr, const PencilLayout& lay,
                   const PeerBlock& b, const std::array<Axis, 3>& order,
                   int tile, Complex* out) {
  const Axis a0 = order[0], a1 = order[1], a2 = order[2];
  const int n0 = axis_count(b.count, a0);
  const int n1 = axis_count(b.count, a1);
  const int n2 = axis_count(b.count, a2);
  const std::size_t s0 = lay.stride(a0), s1 = lay.stride(a1),
                    s2 = lay.stride(a2);
  const std::size_t base = lay.at(b.lo[0], b.lo[1], b.lo[2]);
  for (int t2 = 0; t2 < n2; t2 += tile)
    for (int t1 = 0; t1 < n1; t1 += tile)
      for (int t0 = 0; t0 < n0; t0 += tile) {
        const int e2 = std::min(t2 + tile, n2);
        const int e1 = std::min(t1 + tile, n1);
        const int e0 = std::min(t0 + tile, n0);
        for (int i2 = t2; i2 < e2; ++i2)
          for (int i1 = t1; i1 < e1; ++i1) {
            const Complex* src = arr + base + i2 * s2 + i1 * s1;
            Complex* dst = out + (std::size_t(i2) * n1 + i1) * n0;
            for (int i0 = t0; i0 < e0; ++i0) dst[i0] = src[i0 * s0];
          }
      }
}

void linear_to_box(const Complex* in, Complex* arr, const PencilLayout& lay,
                   const PeerBlock& b, const std::array<Axis, 3>& order,
                   int tile) {
  const Axis a0 = order[0], a1 = order[1], a2 = order[2];
  const int n0 = axis_count(b.count, a0);
  const int n1 = axis_count(b.count, a1);
  const int n2 = axis_count(b.count, a2);
  const std::size_t s0 = lay.stride(a0), s1 = lay.stride(a1),
                    s2 = lay.stride(a2);
  const std::size_t base = lay.at(b.lo[0], b.lo[1], b.lo[2]);
  for (int t2 = 0; t2 < n2; t2 += tile)
    for (int t1 = 0; t1 < n1; t1 += tile)
      for (int t0 = 0; t0 < n0; t0 += tile) {
        const int e2 = std::min(t2 + tile, n2);
        const int e1 = std::min(t1 + tile, n1);
        const int e0 = std::min(t0 + tile, n0);
        for (int i2 = t2; i2 < e2; ++i2)
          for (int i1 = t1; i1 < e1; ++i1) {
            const Complex* src = in + (std::size_t(i2) * n1 + i1) * n0;
            Complex* dst = arr + base + i2 * s2 + i1 * s1;
            for (int i0 = t0; i0 < e0; ++i0) dst[i0 * s0] = src[i0];
          }
      }
}

}  // namespace

void pack(const RemapSchedule& s, std::span<const Complex> src,
          std::span<Complex> send) {
  if (src.size() != s.src.volume())
    throw std::invalid_argument("pack: source size " +
                                std::to_string(src.size()) +
                                " does not match the source layout");
  if (send.size() < s.send_elems)
    throw std::invalid_argument("pack: send buffer too small");
  for (int g = 0; g < s.peers; ++g) {
    const PeerBlock& b = s.pack_blocks[g];
    // blocks are written in destination storage order so that the receiver
    // unpacks with a forward copy
    box_to_linear(src.data(), s.src, b, s.dst.order, s.cache_block,
                  send.data() + b.offset);
    if (s.mode == ExchangeMode::EvenPadded)
      std::fill(send.begin() + b.offset + b.elems,
                send.begin() + b.offset + s.pad_block, Complex{0.0, 0.0});
  }
}

void exchange(const RemapSchedule& s, Group& group,
              std::span<const Complex> send, std::span<Complex> recv) {
  if (group.size() != s.peers || group.index() != s.my_pos)
    throw std::logic_error(
        "exchange: group does not match the schedule's subgroup");
  if (send.size() < s.send_elems || recv.size() < s.recv_elems)
    throw std::invalid_argument("exchange: undersized buffers");
  if (s.mode == ExchangeMode::EvenPadded) {
    group.alltoall_even(send.first(s.send_elems), recv.first(s.recv_elems),
                        s.pad_block);
    return;
  }
  ExchangePlan plan;
  plan.send_counts.reserve(s.peers);
  plan.send_displs.reserve(s.peers);
  plan.recv_counts.reserve(s.peers);
  plan.recv_displs.reserve(s.peers);
  for (int g = 0; g < s.peers; ++g) {
    plan.send_counts.push_back(s.pack_blocks[g].elems);
    plan.send_displs.push_back(s.pack_blocks[g].offset);
    plan.recv_counts.push_back(s.unpack_blocks[g].elems);
    plan.recv_displs.push_back(s.unpack_blocks[g].offset);
  }
  group.alltoall_varying(send.first(s.send_elems), recv.first(s.recv_elems),
                         plan);
}

void unpack(const RemapSchedule& s, std::span<const Complex> recv,
            std::span<Complex> dst) {
  if (dst.size() != s.dst.volume())
    throw std::invalid_argument("unpack: destination size " +
                                std::to_string(dst.size()) +
                                " does not match the destination layout");
  if (recv.size() < s.recv_elems)
    throw std::invalid_argument("unpack: receive buffer too small");
  for (int g = 0; g < s.peers; ++g) {
    const PeerBlock& b = s.unpack_blocks[g];
    linear_to_box(recv.data() + b.offset, dst.data(), s.dst, b, s.dst.order,
                  s.cache_block);
  }
}

}  // namespace pencilfft
