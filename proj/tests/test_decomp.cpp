#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "pencilfft/decomp.hpp"

using namespace pencilfft;

TEST_CASE("partition: even division") {
  auto p = partition(8, 4);
  CHECK(p.counts == std::vector<int>{2, 2, 2, 2});
  CHECK(p.starts == std::vector<int>{0, 2, 4, 6});
}

TEST_CASE("partition: uneven blocks, larger parts first") {
  auto p = partition(256, 6);
  CHECK(p.counts == std::vector<int>{43, 43, 43, 43, 42, 42});
  auto q = partition(65, 4);
  CHECK(q.counts == std::vector<int>{17, 16, 16, 16});
  CHECK(q.starts == std::vector<int>{0, 17, 33, 49});
}

TEST_CASE("partition: block rule properties") {
  for (int n : {1, 2, 5, 7, 30, 65, 127, 128, 1000})
    for (int m = 1; m <= n && m <= 24; ++m) {
      auto p = partition(n, m);
      int sum = 0, mx = 0, mn = n + 1;
      for (int i = 0; i < m; ++i) {
        CHECK(p.counts[i] >= 1);
        CHECK(p.starts[i] == sum);
        sum += p.counts[i];
        mx = std::max(mx, p.counts[i]);
        mn = std::min(mn, p.counts[i]);
      }
      CHECK(sum == n);
      CHECK(mx - mn <= 1);
      // deterministic
      CHECK(partition(n, m) == p);
      // ownership lookup is consistent
      for (int g = 0; g < n; ++g) {
        const int part = p.part_of(g);
        CHECK(g >= p.starts[part]);
        CHECK(g < p.starts[part] + p.counts[part]);
      }
    }
}

TEST_CASE("partition: infeasible") {
  CHECK_THROWS_AS(partition(3, 4), std::invalid_argument);
  CHECK_THROWS_AS(partition(5, 0), std::invalid_argument);
}

TEST_CASE("GlobalGrid validation") {
  GlobalGrid g(30, 16, 8);
  CHECK(g.nc == 16);
  CHECK(g.volume() == 30 * 16 * 8);
  CHECK(g.spectral_volume() == 16 * 16 * 8);
  CHECK_THROWS_AS(GlobalGrid(15, 16, 8), std::invalid_argument);  // odd nx
  CHECK_THROWS_AS(GlobalGrid(14, 16, 8), std::invalid_argument);  // factor 7
  CHECK_THROWS_AS(GlobalGrid(16, 16, 1), std::invalid_argument);  // too small
}

TEST_CASE("validate_procgrid") {
  GlobalGrid big(2048, 2048, 2048);
  CHECK(validate_procgrid(big, ProcGrid{32, 32}).empty());
  auto v = validate_procgrid(big, ProcGrid{1, 4096});
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("m2") != std::string::npos);

  GlobalGrid small(30, 16, 8);
  CHECK(validate_procgrid(small, ProcGrid{4, 2}).empty());
  CHECK(!validate_procgrid(small, ProcGrid{4, 12}).empty());  // m2 > nz
  CHECK(!validate_procgrid(small, ProcGrid{20, 1}).empty());  // m1 > nc
}

TEST_CASE("layout: local dims and orders, stride1 on, grid (30,16,8) pg 4x2") {
  GlobalGrid g(30, 16, 8);
  ProcGrid pg{4, 2};
  auto lx = layout(g, pg, 0, Pencil::X, true);
  CHECK(lx.shape() == std::array<int, 3>{30, 4, 4});
  CHECK(lx.order == std::array{Axis::X, Axis::Y, Axis::Z});
  CHECK(lx.elem == Elem::Real);

  auto ly = layout(g, pg, 0, Pencil::Y, true);
  CHECK(ly.shape() == std::array<int, 3>{16, 4, 4});
  CHECK(ly.order == std::array{Axis::Y, Axis::X, Axis::Z});
  CHECK(ly.elem == Elem::Complex);

  auto lz = layout(g, pg, 0, Pencil::Z, true);
  CHECK(lz.shape() == std::array<int, 3>{8, 8, 4});
  CHECK(lz.order == std::array{Axis::Z, Axis::Y, Axis::X});
}

TEST_CASE("layout: stride1 off keeps XYZ storage") {
  GlobalGrid g(30, 16, 8);
  ProcGrid pg{4, 2};
  auto ly = layout(g, pg, 0, Pencil::Y, false);
  CHECK(ly.shape() == std::array<int, 3>{4, 16, 4});
  CHECK(ly.order == std::array{Axis::X, Axis::Y, Axis::Z});
  auto lz = layout(g, pg, 0, Pencil::Z, false);
  CHECK(lz.shape() == std::array<int, 3>{4, 8, 8});
  CHECK(lz.order == std::array{Axis::X, Axis::Y, Axis::Z});
}

TEST_CASE("layout: uneven 128^3 over 4x2, Y-pencil per row position") {
  GlobalGrid g(128, 128, 128);
  ProcGrid pg{4, 2};
  for (int rank = 0; rank < 8; ++rank) {
    auto l = layout(g, pg, rank, Pencil::Y, true);
    const int row = pg.row_of(rank);
    const std::array<int, 3> want{128, row == 0 ? 17 : 16, 64};
    CHECK(l.shape() == want);
  }
}

TEST_CASE("layout: pure function of arguments") {
  GlobalGrid g(12, 10, 8);
  ProcGrid pg{2, 2};
  for (int rank = 0; rank < 4; ++rank)
    for (auto pencil : {Pencil::X, Pencil::Y, Pencil::Z})
      for (bool s1 : {false, true})
        CHECK(layout(g, pg, rank, pencil, s1) ==
              layout(g, pg, rank, pencil, s1));
}

TEST_CASE("layout: local volumes sum to the global element count") {
  for (auto [nx, ny, nz] : {std::array{30, 16, 8}, std::array{128, 128, 128},
                            std::array{12, 10, 8}}) {
    GlobalGrid g(nx, ny, nz);
    for (auto [m1, m2] : {std::array{1, 1}, std::array{4, 2}, std::array{2, 3},
                          std::array{3, 2}, std::array{1, 6}}) {
      ProcGrid pg{m1, m2};
      if (!validate_procgrid(g, pg).empty()) continue;
      for (bool s1 : {false, true}) {
        std::int64_t vx = 0, vy = 0, vz = 0, vcx = 0;
        for (int r = 0; r < pg.size(); ++r) {
          vx += layout(g, pg, r, Pencil::X, s1).volume();
          vy += layout(g, pg, r, Pencil::Y, s1).volume();
          vz += layout(g, pg, r, Pencil::Z, s1).volume();
          vcx += complex_x_layout(g, pg, r).volume();
        }
        CHECK(vx == g.volume());
        CHECK(vy == g.spectral_volume());
        CHECK(vz == g.spectral_volume());
        CHECK(vcx == g.spectral_volume());
      }
    }
  }
}

TEST_CASE("layout: divisible grids match the closed forms") {
  GlobalGrid g(32, 24, 16);  // nc = 17 not divisible; closed forms on Y/Z dims
  ProcGrid pg{4, 2};
  auto lx = layout(g, pg, 5, Pencil::X, true);
  CHECK(lx.extent_of(Axis::X) == 32);
  CHECK(lx.extent_of(Axis::Y) == 24 / 4);
  CHECK(lx.extent_of(Axis::Z) == 16 / 2);

  // all six cells with every distributed extent divisible
  GlobalGrid h(30, 16, 8);
  ProcGrid qg{4, 2};  // nc = 16: 16/4, 16/2, 8/2 all integral
  for (int r = 0; r < 8; ++r) {
    CHECK(layout(h, qg, r, Pencil::X, true).shape() ==
          std::array<int, 3>{30, 4, 4});
    CHECK(layout(h, qg, r, Pencil::X, false).shape() ==
          std::array<int, 3>{30, 4, 4});
    CHECK(layout(h, qg, r, Pencil::Y, true).shape() ==
          std::array<int, 3>{16, 4, 4});
    CHECK(layout(h, qg, r, Pencil::Y, false).shape() ==
          std::array<int, 3>{4, 16, 4});
    CHECK(layout(h, qg, r, Pencil::Z, true).shape() ==
          std::array<int, 3>{8, 8, 4});
    CHECK(layout(h, qg, r, Pencil::Z, false).shape() ==
          std::array<int, 3>{4, 8, 8});
  }
}

TEST_CASE("layout: rank out of range / invalid grid propagate") {
  GlobalGrid g(30, 16, 8);
  CHECK_THROWS_AS(layout(g, ProcGrid{4, 12}, 0, Pencil::X, true),
                  std::invalid_argument);
  CHECK_THROWS_AS(layout(g, ProcGrid{4, 2}, 8, Pencil::X, true),
                  std::invalid_argument);
}

TEST_CASE("round-trip indexing: global -> (rank, local) -> global") {
  GlobalGrid g(12, 10, 8);
  for (auto [m1, m2] : {std::array{2, 2}, std::array{3, 2}, std::array{1, 4}}) {
    ProcGrid pg{m1, m2};
    for (bool s1 : {false, true})
      for (auto pencil : {Pencil::X, Pencil::Y, Pencil::Z}) {
        const int gx_max = pencil == Pencil::X ? g.nx : g.nc;
        std::map<int, std::set<std::size_t>> seen;
        for (int gz = 0; gz < g.nz; ++gz)
          for (int gy = 0; gy < g.ny; ++gy)
            for (int gx = 0; gx < gx_max; ++gx) {
              auto loc = owner_of(g, pg, pencil, s1, gx, gy, gz);
              REQUIRE(loc.rank >= 0);
              REQUIRE(loc.rank < pg.size());
              auto l = layout(g, pg, loc.rank, pencil, s1);
              REQUIRE(loc.index < l.volume());
              // invert through the layout
              auto c = l.coords_of(loc.index);
              CHECK(c[0] + l.offset_of(Axis::X) == gx);
              CHECK(c[1] + l.offset_of(Axis::Y) == gy);
              CHECK(c[2] + l.offset_of(Axis::Z) == gz);
              // no two globals land on the same slot
              CHECK(seen[loc.rank].insert(loc.index).second);
            }
        // every local slot was hit exactly once
        std::size_t total = 0;
        for (auto& [rank, slots] : seen) total += slots.size();
        CHECK(total == std::size_t(gx_max) * g.ny * g.nz);
      }
  }
}
