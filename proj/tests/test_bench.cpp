#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "harness_helpers.hpp"
#include "oracles.hpp"
#include "pencilfft/bench.hpp"

using namespace pencilfft;
using oracle::kPi;

namespace {

std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string f;
  std::istringstream is(line);
  while (std::getline(is, f, ',')) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("init_sine: zero plane at x = 0, matches the closed form") {
  GlobalGrid g(16, 16, 16);
  ProcGrid pg{2, 2};
  for (int rank = 0; rank < 4; ++rank) {
    auto l = layout(g, pg, rank, Pencil::X, false);
    auto f = bench::init_sine(g, l);
    for (std::size_t i = 0; i < f.data.size(); ++i) {
      const auto c = l.coords_of(i);
      const int gx = c[0], gy = c[1] + l.offset_of(Axis::Y),
                gz = c[2] + l.offset_of(Axis::Z);
      if (gx == 0) CHECK(f.data[i] == 0.0);
      const double want = std::sin(2 * kPi * gx / 16.0) *
                          std::sin(2 * kPi * gy / 16.0) *
                          std::sin(2 * kPi * gz / 16.0);
      CHECK(f.data[i] == doctest::Approx(want).epsilon(1e-15));
    }
  }
}

TEST_CASE("init_sine: the gathered field is decomposition independent") {
  GlobalGrid g(12, 10, 8);
  auto gathered = [&](ProcGrid pg) {
    std::vector<double> global(g.volume());
    for (int r = 0; r < pg.size(); ++r) {
      auto l = layout(g, pg, r, Pencil::X, false);
      auto f = bench::init_sine(g, l);
      for (std::size_t i = 0; i < f.data.size(); ++i) {
        const auto c = l.coords_of(i);
        global[(c[0]) + std::size_t(g.nx) *
                            ((c[1] + l.offset_of(Axis::Y)) +
                             std::size_t(g.ny) * (c[2] + l.offset_of(Axis::Z)))] =
            f.data[i];
      }
    }
    return global;
  };
  auto a = gathered(ProcGrid{1, 1});
  for (auto pg : {ProcGrid{2, 2}, ProcGrid{1, 4}, ProcGrid{3, 2}})
    CHECK(gathered(pg) == a);
}

TEST_CASE("run: sweep over 16^3 with P=4 gives three passing records") {
  bench::BenchConfig cfg;
  cfg.nx = cfg.ny = cfg.nz = 16;
  cfg.ranks = 4;
  cfg.mode = bench::GridMode::Sweep;
  auto records = bench::run(cfg);
  REQUIRE(records.size() == 3);
  CHECK(records[0].m1 == 1);
  CHECK(records[1].m1 == 2);
  CHECK(records[2].m1 == 4);
  for (const auto& r : records) {
    CHECK(r.pass);
    CHECK(r.max_rel_err < 1e-10);
    CHECK(r.t_comm_mean <= r.t_mean);
    CHECK(r.t_min <= r.t_mean);
    CHECK(r.t_mean <= r.t_max);
    CHECK(r.flops > 0);
  }
}

TEST_CASE("run: USEEVEN does not change the round-trip error") {
  bench::BenchConfig cfg;
  cfg.nx = 30;
  cfg.ny = 16;
  cfg.nz = 8;
  cfg.ranks = 6;
  cfg.mode = bench::GridMode::Explicit;
  cfg.m1 = 3;
  cfg.m2 = 2;
  auto a = bench::run(cfg);
  cfg.useeven = true;
  auto b = bench::run(cfg);
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 1);
  CHECK(a[0].pass);
  CHECK(b[0].pass);
  CHECK(a[0].max_rel_err == b[0].max_rel_err);  // bit-exact mode equivalence
}

TEST_CASE("run: iteration count changes statistics, not correctness") {
  bench::BenchConfig cfg;
  cfg.nx = cfg.ny = cfg.nz = 8;
  cfg.ranks = 2;
  cfg.mode = bench::GridMode::Explicit;
  cfg.m1 = 1;
  cfg.m2 = 2;
  cfg.iters = 1;
  auto one = bench::run(cfg);
  cfg.iters = 5;
  auto five = bench::run(cfg);
  CHECK(one[0].pass == five[0].pass);
  CHECK(one[0].max_rel_err == five[0].max_rel_err);
  CHECK(five[0].iters == 5);
}

TEST_CASE("run: infeasible sweep points become failed records") {
  bench::BenchConfig cfg;
  cfg.nx = cfg.ny = cfg.nz = 8;  // nc = 5
  cfg.ranks = 8;
  cfg.mode = bench::GridMode::Sweep;
  auto records = bench::run(cfg);
  REQUIRE(records.size() == 4);  // 1x8, 2x4, 4x2, 8x1
  int failed = 0;
  for (const auto& r : records)
    if (!r.pass) {
      ++failed;
      CHECK(r.m1 == 8);  // m1 = 8 > nc = 5
      CHECK(!r.note.empty());
    }
  CHECK(failed == 1);
}

TEST_CASE("run: auto mode picks the smallest divisor above cores-per-node") {
  bench::BenchConfig cfg;
  cfg.nx = cfg.ny = cfg.nz = 16;
  cfg.ranks = 6;
  cfg.mode = bench::GridMode::Auto;
  cfg.cores_per_node = 2;
  auto records = bench::run(cfg);
  REQUIRE(records.size() == 1);
  CHECK(records[0].m1 == 2);
  CHECK(records[0].m2 == 3);
}

TEST_CASE("run: oracle cross-check on 16^3 passes, large grids rejected") {
  bench::BenchConfig cfg;
  cfg.nx = cfg.ny = cfg.nz = 16;
  cfg.ranks = 4;
  cfg.mode = bench::GridMode::Explicit;
  cfg.m1 = 2;
  cfg.m2 = 2;
  cfg.oracle = true;
  auto records = bench::run(cfg);
  CHECK(records[0].pass);

  cfg.nx = cfg.ny = cfg.nz = 64;
  CHECK_THROWS_AS(bench::run(cfg), std::invalid_argument);
}

TEST_CASE("sweep_report: minimum time wins, ties break to smaller m1") {
  auto make = [](int m1, int m2, double t, bool pass = true) {
    bench::BenchRecord r;
    r.nx = r.ny = r.nz = 64;
    r.p = 16;
    r.m1 = m1;
    r.m2 = m2;
    r.t_mean = t;
    r.pass = pass;
    return r;
  };
  auto best = bench::sweep_report(
      {make(1, 16, 1.0), make(2, 8, 0.8), make(4, 4, 1.2)});
  REQUIRE(best.size() == 1);
  CHECK(best[0].m1 == 2);

  best = bench::sweep_report({make(4, 4, 0.9), make(2, 8, 0.9)});
  CHECK(best[0].m1 == 2);

  best = bench::sweep_report({make(4, 4, 1.1)});
  CHECK(best[0].m1 == 4);

  CHECK_THROWS_AS(bench::sweep_report({make(4, 4, 1.0, false)}),
                  std::invalid_argument);
}

TEST_CASE("CSV: all fields except timings are deterministic") {
  bench::BenchConfig cfg;
  cfg.nx = cfg.ny = cfg.nz = 8;
  cfg.ranks = 4;
  cfg.mode = bench::GridMode::Sweep;
  std::ostringstream a, b;
  bench::write_csv(a, bench::run(cfg));
  bench::write_csv(b, bench::run(cfg));

  std::istringstream sa(a.str()), sb(b.str());
  std::string la, lb;
  std::getline(sa, la);
  std::getline(sb, lb);
  CHECK(la == bench::csv_header());
  CHECK(lb == bench::csv_header());
  while (std::getline(sa, la) && std::getline(sb, lb)) {
    auto fa = csv_fields(la), fb = csv_fields(lb);
    REQUIRE(fa.size() == 17);
    REQUIRE(fb.size() == 17);
    for (std::size_t i = 0; i < 17; ++i) {
      const bool timing = (i >= 10 && i <= 13) || i == 16;
      if (!timing) CHECK(fa[i] == fb[i]);
    }
  }
}

TEST_CASE("CSV: append writes one header per file") {
  const std::string path = "bench_append_test.csv";
  std::remove(path.c_str());
  bench::BenchConfig cfg;
  cfg.nx = cfg.ny = cfg.nz = 8;
  cfg.ranks = 1;
  cfg.mode = bench::GridMode::Explicit;
  cfg.m1 = cfg.m2 = 1;
  auto records = bench::run(cfg);
  bench::append_csv(path, records);
  bench::append_csv(path, records);
  std::ifstream in(path);
  std::string line;
  int lines = 0, headers = 0;
  while (std::getline(in, line)) {
    ++lines;
    if (line == bench::csv_header()) ++headers;
  }
  std::remove(path.c_str());
  CHECK(lines == 3);
  CHECK(headers == 1);
}

TEST_CASE("Chebyshev and empty third kinds pass the round-trip check") {
  for (auto third : {ThirdKind::Cheb, ThirdKind::Empty}) {
    bench::BenchConfig cfg;
    cfg.nx = 12;
    cfg.ny = 10;
    cfg.nz = 9;
    cfg.ranks = 4;
    cfg.mode = bench::GridMode::Explicit;
    cfg.m1 = 2;
    cfg.m2 = 2;
    cfg.third = third;
    cfg.oracle = true;
    auto records = bench::run(cfg);
    REQUIRE(records.size() == 1);
    CHECK_MESSAGE(records[0].pass, records[0].note);
  }
}
