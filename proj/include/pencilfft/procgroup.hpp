#ifndef PENCILFFT_PROCGROUP_HPP_
#define PENCILFFT_PROCGROUP_HPP_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pencilfft/decomp.hpp"

namespace pencilfft {

/// A collective was called with mismatched arguments across the group
/// (different block sizes, inconsistent count matrices, wrong op, ...).
class CollectiveContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Diagnostic raised when a collective waits longer than the harness
/// timeout, which in practice means some member never made the call.
class CollectiveTimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised in ranks parked inside a collective when another rank of the
/// harness failed; the originating error is what Harness::run rethrows.
class CollectiveAbortedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-peer element counts and displacements for a varying all-to-all.
/// Entry [i] describes the block exchanged with group member i; counts are
/// in elements, displacements are element offsets into the send/receive
/// buffers.
struct ExchangePlan {
  std::vector<std::size_t> send_counts;
  std::vector<std::size_t> send_displs;
  std::vector<std::size_t> recv_counts;
  std::vector<std::size_t> recv_displs;
};

namespace detail {
struct GroupState;
struct WorldState;
}  // namespace detail

/**
 * Handle to one rank's membership in a process group. Each rank context
 * holds its own Group object; the collective operations block until every
 * member of the group has made the matching call, then deliver data
 * copy-in/copy-out through shared memory.
 *
 * The element type of exchange buffers is opaque to this layer: any
 * trivially copyable T works, and all members must use the same T.
 */
class Group {
 public:
  Group() = default;

  int size() const;
  int index() const { return index_; }
  /// World ranks of the members, ordered by group index.
  const std::vector<int>& world_ranks() const;

  /// Blocks until all members arrive.
  void barrier();

  /**
   * Even all-to-all: send buffer holds size() blocks of `block` elements;
   * after the call receive block j holds the block member j addressed to
   * this member.
   */
  template <typename T>
  void alltoall_even(std::span<const T> send, std::span<T> recv,
                     std::size_t block) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::vector<std::size_t> counts(size(), block), displs(size());
    for (int i = 0; i < size(); ++i) displs[i] = block * i;
    exchange_bytes(reinterpret_cast<const std::byte*>(send.data()),
                   send.size() * sizeof(T),
                   reinterpret_cast<std::byte*>(recv.data()),
                   recv.size() * sizeof(T), sizeof(T), counts, displs, counts,
                   displs, /*op_tag=*/1);
  }

  /// Varying all-to-all, MPI_Alltoallv style.
  template <typename T>
  void alltoall_varying(std::span<const T> send, std::span<T> recv,
                        const ExchangePlan& plan) {
    static_assert(std::is_trivially_copyable_v<T>);
    exchange_bytes(reinterpret_cast<const std::byte*>(send.data()),
                   send.size() * sizeof(T),
                   reinterpret_cast<std::byte*>(recv.data()),
                   recv.size() * sizeof(T), sizeof(T), plan.send_counts,
                   plan.send_displs, plan.recv_counts, plan.recv_displs,
                   /*op_tag=*/2);
  }

 private:
  friend class Harness;
  friend std::pair<Group, Group> split(Group& world, const ProcGrid& pg);

  Group(std::shared_ptr<detail::GroupState> state, int index,
        detail::WorldState* world)
      : state_(std::move(state)), index_(index), world_(world) {}

  void exchange_bytes(const std::byte* send, std::size_t send_bytes,
                      std::byte* recv, std::size_t recv_bytes,
                      std::size_t elem_size,
                      const std::vector<std::size_t>& send_counts,
                      const std::vector<std::size_t>& send_displs,
                      const std::vector<std::size_t>& recv_counts,
                      const std::vector<std::size_t>& recv_displs, int op_tag);

  std::shared_ptr<detail::GroupState> state_;
  int index_ = 0;
  detail::WorldState* world_ = nullptr;
};

/**
 * Splits the world group into this rank's ROW and COLUMN subgroups of the
 * virtual processor grid: the row group joins the m1 ranks sharing this
 * rank's column coordinate (ordered by row), the column group the m2 ranks
 * sharing its row coordinate (ordered by column).
 */
std::pair<Group, Group> split(Group& world, const ProcGrid& pg);

/**
 * In-process process-group backend: runs P rank contexts on P threads of
 * one process. Collectives rendezvous through shared state, so the full
 * parallel dataflow is executable and checkable on one machine. A
 * network-backed implementation of the same Group interface is the
 * intended extension point.
 */
class Harness {
 public:
  struct Config {
    /// Per-collective wait before a timeout diagnostic is raised.
    int timeout_ms = 60000;
  };

  explicit Harness(int ranks);
  Harness(int ranks, Config cfg);
  ~Harness();

  Harness(const Harness&) = delete;
  Harness& operator=(const Harness&) = delete;

  int ranks() const { return ranks_; }

  /**
   * Runs `rank_main(world_group)` on one thread per rank and joins them
   * all. The first non-timeout exception raised by any rank is rethrown
   * (falling back to the first timeout if that is all there is).
   */
  void run(const std::function<void(Group&)>& rank_main);

 private:
  int ranks_ = 1;
  std::unique_ptr<detail::WorldState> world_;
};

}  // namespace pencilfft

#endif  // PENCILFFT_PROCGROUP_HPP_
