#include "pencilfft/procgroup.hpp"

#include <chrono>
#include <condition_variable>
#include <cstring>
#include <map>
#include <mutex>
#include <thread>

namespace pencilfft {

namespace detail {

// One member's buffer registration for the collective in flight. The count
// vectors stay alive on the caller's stack for the whole rendezvous.
struct Post {
  const std::byte* send = nullptr;
  std::size_t send_bytes = 0;
  std::byte* recv = nullptr;
  std::size_t recv_bytes = 0;
  std::size_t elem_size = 1;
  const std::vector<std::size_t>* send_counts = nullptr;
  const std::vector<std::size_t>* send_displs = nullptr;
  const std::vector<std::size_t>* recv_counts = nullptr;
  const std::vector<std::size_t>* recv_displs = nullptr;
  int op_tag = 0;
};

// Rendezvous shared by all members of one group. A collective is one
// generation: members arrive, the last one validates every post, moves the
// data single-threadedly, and wakes the rest. Within a rank calls are
// sequential, so one in-flight slot per group suffices.
struct GroupState {
  explicit GroupState(std::vector<int> m, int timeout)
      : members(std::move(m)), posts(members.size()), timeout_ms(timeout) {}

  std::vector<int> members;
  std::mutex mu;
  std::condition_variable cv;
  std::uint64_t generation = 0;
  int arrived = 0;
  std::vector<Post> posts;
  std::string pending_error;  // delivered to every member of the generation
  bool aborted = false;       // another rank of the harness failed
  int timeout_ms;
};

struct WorldState {
  WorldState(int ranks, int timeout_ms) : timeout_ms(timeout_ms) {
    std::vector<int> all(ranks);
    for (int r = 0; r < ranks; ++r) all[r] = r;
    world_group = std::make_shared<GroupState>(std::move(all), timeout_ms);
  }

  std::shared_ptr<GroupState> get_or_create(int kind, std::vector<int> members) {
    std::lock_guard lk(registry_mu);
    auto key = std::make_pair(kind, members);
    auto it = registry.find(key);
    if (it != registry.end()) return it->second;
    auto state = std::make_shared<GroupState>(std::move(members), timeout_ms);
    state->aborted = aborted;  // groups born during teardown stay inert
    registry.emplace(std::move(key), state);
    return state;
  }

  void set_aborted(bool value) {
    std::lock_guard lk(registry_mu);
    aborted = value;
    auto flip = [value](GroupState& st) {
      {
        std::lock_guard g(st.mu);
        st.aborted = value;
      }
      st.cv.notify_all();
    };
    flip(*world_group);
    for (auto& [key, state] : registry) flip(*state);
  }

  int timeout_ms;
  bool aborted = false;  // guarded by registry_mu
  std::shared_ptr<GroupState> world_group;
  std::mutex registry_mu;
  std::map<std::pair<int, std::vector<int>>, std::shared_ptr<GroupState>>
      registry;
};

namespace {

std::string validate_posts(const GroupState& st) {
  const int g = int(st.members.size());
  const Post& first = st.posts[0];
  for (int i = 0; i < g; ++i) {
    const Post& p = st.posts[i];
    if (p.op_tag != first.op_tag)
      return "members called different collective operations";
    if (p.elem_size != first.elem_size)
      return "members used different element sizes";
    for (auto* v : {p.send_counts, p.send_displs, p.recv_counts, p.recv_displs})
      if (int(v->size()) != g)
        return "count/displacement vectors must have one entry per member";
    for (int j = 0; j < g; ++j) {
      if (((*p.send_displs)[j] + (*p.send_counts)[j]) * p.elem_size >
          p.send_bytes)
        return "send region out of bounds at member " + std::to_string(i);
      if (((*p.recv_displs)[j] + (*p.recv_counts)[j]) * p.elem_size >
          p.recv_bytes)
        return "receive region out of bounds at member " + std::to_string(i);
    }
  }
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      if ((*st.posts[i].send_counts)[j] != (*st.posts[j].recv_counts)[i])
        return "send count " + std::to_string((*st.posts[i].send_counts)[j]) +
               " from member " + std::to_string(i) + " to " +
               std::to_string(j) + " does not match the expected receive " +
               std::to_string((*st.posts[j].recv_counts)[i]);
  return {};
}

void deliver_posts(GroupState& st) {
  const int g = int(st.members.size());
  const std::size_t es = st.posts[0].elem_size;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      const std::size_t bytes = (*st.posts[i].send_counts)[j] * es;
      if (bytes == 0) continue;
      std::memcpy(st.posts[j].recv + (*st.posts[j].recv_displs)[i] * es,
                  st.posts[i].send + (*st.posts[i].send_displs)[j] * es,
                  bytes);
    }
}

}  // namespace

}  // namespace detail

int Group::size() const {
  if (!state_) throw std::logic_error("empty Group handle");
  return int(state_->members.size());
}

const std::vector<int>& Group::world_ranks() const {
  if (!state_) throw std::logic_error("empty Group handle");
  return state_->members;
}

void Group::exchange_bytes(const std::byte* send, std::size_t send_bytes,
                           std::byte* recv, std::size_t recv_bytes,
                           std::size_t elem_size,
                           const std::vector<std::size_t>& send_counts,
                           const std::vector<std::size_t>& send_displs,
                           const std::vector<std::size_t>& recv_counts,
                           const std::vector<std::size_t>& recv_displs,
                           int op_tag) {
  if (!state_) throw std::logic_error("empty Group handle");
  auto& st = *state_;

  std::unique_lock lk(st.mu);
  if (st.aborted)
    throw CollectiveAbortedError("collective abandoned: another rank failed");
  const std::uint64_t my_gen = st.generation;
  st.posts[index_] = detail::Post{send,         send_bytes,  recv,
                                  recv_bytes,   elem_size,   &send_counts,
                                  &send_displs, &recv_counts, &recv_displs,
                                  op_tag};
  ++st.arrived;

  if (st.arrived == int(st.members.size())) {
    st.pending_error = detail::validate_posts(st);
    if (st.pending_error.empty()) detail::deliver_posts(st);
    st.arrived = 0;
    ++st.generation;
    const std::string err = st.pending_error;
    lk.unlock();
    st.cv.notify_all();
    if (!err.empty()) throw CollectiveContractError(err);
    return;
  }

  const bool woke = st.cv.wait_for(
      lk, std::chrono::milliseconds(st.timeout_ms),
      [&] { return st.generation != my_gen || st.aborted; });
  if (st.generation == my_gen) {  // never completed
    --st.arrived;
    if (st.aborted)
      throw CollectiveAbortedError(
          "collective abandoned: another rank failed");
    (void)woke;
    throw CollectiveTimeoutError(
        "collective timed out after " + std::to_string(st.timeout_ms) +
        " ms waiting on a group of " + std::to_string(st.members.size()) +
        " members (a member likely never made the call)");
  }
  if (!st.pending_error.empty())
    throw CollectiveContractError(st.pending_error);
}

void Group::barrier() {
  const std::vector<std::size_t> zero(size(), 0);
  exchange_bytes(nullptr, 0, nullptr, 0, 1, zero, zero, zero, zero,
                 /*op_tag=*/0);
}

std::pair<Group, Group> split(Group& world, const ProcGrid& pg) {
  if (!world.world_ || world.state_ != world.world_->world_group)
    throw std::logic_error("split needs the harness world group");
  if (world.size() != pg.size())
    throw std::invalid_argument(
        "split: world size " + std::to_string(world.size()) +
        " does not match procgrid " + std::to_string(pg.m1) + "x" +
        std::to_string(pg.m2));
  const int rank = world.state_->members[world.index_];
  const int row = pg.row_of(rank);
  const int col = pg.col_of(rank);

  std::vector<int> row_members(pg.m1);
  for (int i = 0; i < pg.m1; ++i) row_members[i] = pg.rank_of(i, col);
  std::vector<int> col_members(pg.m2);
  for (int j = 0; j < pg.m2; ++j) col_members[j] = pg.rank_of(row, j);

  Group row_group(world.world_->get_or_create(0, std::move(row_members)), row,
                  world.world_);
  Group col_group(world.world_->get_or_create(1, std::move(col_members)), col,
                  world.world_);
  return {std::move(row_group), std::move(col_group)};
}

Harness::Harness(int ranks) : Harness(ranks, Config{}) {}

Harness::Harness(int ranks, Config cfg) : ranks_(ranks) {
  if (ranks < 1) throw std::invalid_argument("harness needs at least 1 rank");
  world_ = std::make_unique<detail::WorldState>(ranks, cfg.timeout_ms);
}

Harness::~Harness() = default;

void Harness::run(const std::function<void(Group&)>& rank_main) {
  std::vector<std::exception_ptr> errors(ranks_);
  std::vector<std::thread> threads;
  threads.reserve(ranks_);
  for (int r = 0; r < ranks_; ++r)
    threads.emplace_back([this, r, &rank_main, &errors] {
      Group g(world_->world_group, r, world_.get());
      try {
        rank_main(g);
      } catch (...) {
        errors[r] = std::current_exception();
        // release ranks parked in collectives this rank will never join
        world_->set_aborted(true);
      }
    });
  for (auto& t : threads) t.join();
  world_->set_aborted(false);

  // aborts and timeouts are symptoms of another rank's failure; surface the
  // root cause first
  std::exception_ptr timeout, abort;
  for (auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const CollectiveAbortedError&) {
      if (!abort) abort = e;
    } catch (const CollectiveTimeoutError&) {
      if (!timeout) timeout = e;
    } catch (...) {
      std::rethrow_exception(e);
    }
  }
  if (timeout) std::rethrow_exception(timeout);
  if (abort) std::rethrow_exception(abort);
}

}  // namespace pencilfft
