#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <map>
#include <set>

#include "pencilfft/procgroup.hpp"

using namespace pencilfft;

namespace {

// Runs fn on every rank and collects one result per rank.
template <typename T, typename Fn>
std::vector<T> run_collect(int ranks, Fn fn, int timeout_ms = 60000) {
  Harness h(ranks, Harness::Config{timeout_ms});
  std::vector<T> results(ranks);
  h.run([&](Group& world) { results[world.index()] = fn(world); });
  return results;
}

}  // namespace

TEST_CASE("split: 2x2 grid") {
  auto groups = run_collect<std::pair<std::vector<int>, std::vector<int>>>(
      4, [](Group& world) {
        auto [row, col] = split(world, ProcGrid{2, 2});
        return std::make_pair(row.world_ranks(), col.world_ranks());
      });
  CHECK(groups[0].first == std::vector<int>{0, 1});
  CHECK(groups[1].first == std::vector<int>{0, 1});
  CHECK(groups[2].first == std::vector<int>{2, 3});
  CHECK(groups[3].first == std::vector<int>{2, 3});
  CHECK(groups[0].second == std::vector<int>{0, 2});
  CHECK(groups[1].second == std::vector<int>{1, 3});
  CHECK(groups[2].second == std::vector<int>{0, 2});
  CHECK(groups[3].second == std::vector<int>{1, 3});
}

TEST_CASE("split: 1xP is the 1D decomposition special case") {
  auto groups = run_collect<std::pair<std::vector<int>, std::vector<int>>>(
      6, [](Group& world) {
        auto [row, col] = split(world, ProcGrid{1, 6});
        return std::make_pair(row.world_ranks(), col.world_ranks());
      });
  for (int r = 0; r < 6; ++r) {
    CHECK(groups[r].first == std::vector<int>{r});           // singleton rows
    CHECK(groups[r].second == std::vector<int>{0, 1, 2, 3, 4, 5});
  }
}

TEST_CASE("split: 3x2 grid") {
  auto groups = run_collect<std::pair<std::vector<int>, std::vector<int>>>(
      6, [](Group& world) {
        auto [row, col] = split(world, ProcGrid{3, 2});
        return std::make_pair(row.world_ranks(), col.world_ranks());
      });
  CHECK(groups[0].first == std::vector<int>{0, 1, 2});
  CHECK(groups[4].first == std::vector<int>{3, 4, 5});
  CHECK(groups[0].second == std::vector<int>{0, 3});
  CHECK(groups[1].second == std::vector<int>{1, 4});
  CHECK(groups[2].second == std::vector<int>{2, 5});
}

TEST_CASE("split: row/column groups partition the world, |row ∩ col| = 1") {
  for (auto [m1, m2] : {std::array{2, 3}, std::array{4, 2}, std::array{1, 8}}) {
    const int p = m1 * m2;
    auto groups = run_collect<std::pair<std::vector<int>, std::vector<int>>>(
        p, [m1 = m1, m2 = m2](Group& world) {
          auto [row, col] = split(world, ProcGrid{m1, m2});
          return std::make_pair(row.world_ranks(), col.world_ranks());
        });
    std::set<std::vector<int>> rows, cols;
    for (auto& [r, c] : groups) {
      rows.insert(r);
      cols.insert(c);
    }
    std::set<int> row_union, col_union;
    std::size_t row_total = 0, col_total = 0;
    for (auto& r : rows) {
      row_total += r.size();
      row_union.insert(r.begin(), r.end());
    }
    for (auto& c : cols) {
      col_total += c.size();
      col_union.insert(c.begin(), c.end());
    }
    CHECK(row_total == std::size_t(p));  // disjoint cover
    CHECK(col_total == std::size_t(p));
    CHECK(int(row_union.size()) == p);
    CHECK(int(col_union.size()) == p);
    for (auto& r : rows)
      for (auto& c : cols) {
        std::vector<int> inter;
        std::set_intersection(r.begin(), r.end(), c.begin(), c.end(),
                              std::back_inserter(inter));
        CHECK(inter.size() == 1);
      }
  }
}

TEST_CASE("split: size mismatch rejected") {
  Harness h(4);
  CHECK_THROWS_AS(
      h.run([](Group& world) { split(world, ProcGrid{3, 2}); }),
      std::invalid_argument);
}

TEST_CASE("alltoall_even: two members, block 1") {
  auto recvs = run_collect<std::vector<double>>(2, [](Group& world) {
    const double base = world.index() == 0 ? 0.0 : 10.0;
    std::vector<double> send{base + 0, base + 1};
    std::vector<double> recv(2);
    world.alltoall_even(std::span<const double>(send), std::span<double>(recv),
                        1);
    return recv;
  });
  CHECK(recvs[0] == std::vector<double>{0, 10});
  CHECK(recvs[1] == std::vector<double>{1, 11});
}

TEST_CASE("alltoall_even: block 0 returns empty") {
  auto recvs = run_collect<int>(3, [](Group& world) {
    std::vector<double> none;
    world.alltoall_even(std::span<const double>(none), std::span<double>(none),
                        0);
    return world.index();
  });
  CHECK(recvs == std::vector<int>{0, 1, 2});
}

TEST_CASE("alltoall_even: block transpose oracle, 4 members x block 2") {
  const int p = 4, block = 2;
  auto recvs = run_collect<std::vector<int>>(p, [&](Group& world) {
    std::vector<int> send(p * block), recv(p * block);
    for (int j = 0; j < p; ++j)
      for (int b = 0; b < block; ++b)
        send[j * block + b] = world.index() * 100 + j * 10 + b;
    world.alltoall_even(std::span<const int>(send), std::span<int>(recv),
                        block);
    return recv;
  });
  // receive block i at member j must be send block j of member i
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < p; ++i)
      for (int b = 0; b < block; ++b)
        CHECK(recvs[j][i * block + b] == i * 100 + j * 10 + b);
}

TEST_CASE("alltoall_even: conservation and determinism") {
  const int p = 4, block = 3;
  auto once = [&] {
    return run_collect<std::vector<double>>(p, [&](Group& world) {
      std::vector<double> send(p * block), recv(p * block);
      for (int i = 0; i < p * block; ++i)
        send[i] = world.index() * 1000.0 + i * 0.5;
      world.alltoall_even(std::span<const double>(send),
                          std::span<double>(recv), block);
      return recv;
    });
  };
  auto a = once();
  auto b = once();
  CHECK(a == b);
  std::multiset<double> sent, received;
  for (int r = 0; r < p; ++r)
    for (int i = 0; i < p * block; ++i) {
      sent.insert(r * 1000.0 + i * 0.5);
      received.insert(a[r][i]);
    }
  CHECK(sent == received);
}

TEST_CASE("alltoall_even: mismatched block is a contract error") {
  Harness h(2);
  CHECK_THROWS_AS(h.run([](Group& world) {
    const std::size_t block = world.index() == 0 ? 2 : 3;
    std::vector<double> send(2 * block), recv(2 * block);
    world.alltoall_even(std::span<const double>(send), std::span<double>(recv),
                        block);
  }),
                  CollectiveContractError);
}

TEST_CASE("alltoall_varying: equal counts match the even exchange") {
  const int p = 3, block = 2;
  auto expected = run_collect<std::vector<int>>(p, [&](Group& world) {
    std::vector<int> send(p * block), recv(p * block);
    for (int i = 0; i < p * block; ++i) send[i] = world.index() * 100 + i;
    world.alltoall_even(std::span<const int>(send), std::span<int>(recv),
                        block);
    return recv;
  });
  auto got = run_collect<std::vector<int>>(p, [&](Group& world) {
    std::vector<int> send(p * block), recv(p * block);
    for (int i = 0; i < p * block; ++i) send[i] = world.index() * 100 + i;
    ExchangePlan plan;
    plan.send_counts.assign(p, block);
    plan.recv_counts.assign(p, block);
    for (int i = 0; i < p; ++i) {
      plan.send_displs.push_back(i * block);
      plan.recv_displs.push_back(i * block);
    }
    world.alltoall_varying(std::span<const int>(send), std::span<int>(recv),
                           plan);
    return recv;
  });
  CHECK(got == expected);
}

TEST_CASE("alltoall_varying: scatter/gather permutation oracle") {
  // count matrix rows (sender i -> receiver j):
  //   [1 2 0]
  //   [0 1 1]
  //   [2 0 1]
  const std::vector<std::vector<std::size_t>> counts{
      {1, 2, 0}, {0, 1, 1}, {2, 0, 1}};
  auto recvs = run_collect<std::vector<int>>(3, [&](Group& world) {
    const int me = world.index();
    ExchangePlan plan;
    plan.send_counts = counts[me];
    std::size_t off = 0;
    for (int j = 0; j < 3; ++j) {
      plan.send_displs.push_back(off);
      off += counts[me][j];
    }
    std::vector<int> send(off);
    // element k of my block for j is tagged me*100 + j*10 + k
    for (int j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < counts[me][j]; ++k)
        send[plan.send_displs[j] + k] = me * 100 + j * 10 + int(k);
    std::size_t roff = 0;
    for (int i = 0; i < 3; ++i) {
      plan.recv_counts.push_back(counts[i][me]);
      plan.recv_displs.push_back(roff);
      roff += counts[i][me];
    }
    std::vector<int> recv(roff);
    world.alltoall_varying(std::span<const int>(send), std::span<int>(recv),
                           plan);
    return recv;
  });
  // receiver j sees, per sender i in order, tags i*100 + j*10 + k
  for (int j = 0; j < 3; ++j) {
    std::vector<int> want;
    for (int i = 0; i < 3; ++i)
      for (std::size_t k = 0; k < counts[i][j]; ++k)
        want.push_back(i * 100 + j * 10 + int(k));
    CHECK(recvs[j] == want);
  }
}

TEST_CASE("alltoall_varying: all-zero counts") {
  auto ok = run_collect<int>(3, [](Group& world) {
    ExchangePlan plan;
    plan.send_counts.assign(3, 0);
    plan.send_displs.assign(3, 0);
    plan.recv_counts.assign(3, 0);
    plan.recv_displs.assign(3, 0);
    std::vector<double> none;
    world.alltoall_varying(std::span<const double>(none),
                           std::span<double>(none), plan);
    return 1;
  });
  CHECK(ok == std::vector<int>{1, 1, 1});
}

TEST_CASE("alltoall_varying: involution with the transposed plan") {
  const std::vector<std::vector<std::size_t>> counts{
      {2, 1, 0}, {1, 1, 2}, {0, 2, 1}};
  auto build_plan = [&](int me, bool transposed) {
    ExchangePlan plan;
    std::size_t soff = 0, roff = 0;
    for (int j = 0; j < 3; ++j) {
      const std::size_t sc = transposed ? counts[j][me] : counts[me][j];
      const std::size_t rc = transposed ? counts[me][j] : counts[j][me];
      plan.send_counts.push_back(sc);
      plan.send_displs.push_back(soff);
      soff += sc;
      plan.recv_counts.push_back(rc);
      plan.recv_displs.push_back(roff);
      roff += rc;
    }
    return plan;
  };
  auto results = run_collect<std::pair<std::vector<int>, std::vector<int>>>(
      3, [&](Group& world) {
        const int me = world.index();
        auto fwd = build_plan(me, false);
        std::size_t send_n = 0, recv_n = 0;
        for (int j = 0; j < 3; ++j) {
          send_n += fwd.send_counts[j];
          recv_n += fwd.recv_counts[j];
        }
        std::vector<int> original(send_n);
        for (std::size_t i = 0; i < send_n; ++i)
          original[i] = me * 100 + int(i);
        std::vector<int> mid(recv_n), back(send_n);
        world.alltoall_varying(std::span<const int>(original),
                               std::span<int>(mid), fwd);
        auto rev = build_plan(me, true);
        world.alltoall_varying(std::span<const int>(mid), std::span<int>(back),
                               rev);
        return std::make_pair(original, back);
      });
  for (auto& [original, back] : results) CHECK(original == back);
}

TEST_CASE("alltoall_varying: inconsistent plan is a contract error") {
  Harness h(2);
  CHECK_THROWS_AS(h.run([](Group& world) {
    ExchangePlan plan;
    // rank 0 claims to send 2 to rank 1; rank 1 expects 1 from rank 0
    if (world.index() == 0) {
      plan.send_counts = {0, 2};
      plan.send_displs = {0, 0};
      plan.recv_counts = {0, 0};
      plan.recv_displs = {0, 0};
    } else {
      plan.send_counts = {0, 0};
      plan.send_displs = {0, 0};
      plan.recv_counts = {1, 0};
      plan.recv_displs = {0, 0};
    }
    std::vector<double> send(2), recv(2);
    world.alltoall_varying(std::span<const double>(send),
                           std::span<double>(recv), plan);
  }),
                  CollectiveContractError);
}

TEST_CASE("absent member raises the timeout diagnostic") {
  Harness h(2, Harness::Config{.timeout_ms = 200});
  CHECK_THROWS_AS(h.run([](Group& world) {
    if (world.index() == 1) return;  // never joins the barrier
    world.barrier();
  }),
                  CollectiveTimeoutError);
}

TEST_CASE("barrier: all members proceed together") {
  std::atomic<int> before{0};
  std::atomic<bool> saw_all{true};
  Harness h(4);
  h.run([&](Group& world) {
    before.fetch_add(1);
    world.barrier();
    if (before.load() != 4) saw_all = false;
  });
  CHECK(saw_all.load());
}
