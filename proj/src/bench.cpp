#include "pencilfft/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "pencilfft/perfmodel.hpp"

namespace pencilfft::bench {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::int64_t kOracleMaxVolume = 32 * 32 * 32;

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// splitmix64; gives every global coordinate a seed-stable value in [-1, 1]
// independent of the decomposition
double hashed_unit(std::uint64_t seed, int gx, int gy, int gz) {
  std::uint64_t x = seed;
  for (std::uint64_t v :
       {std::uint64_t(gx), std::uint64_t(gy), std::uint64_t(gz)}) {
    x += 0x9e3779b97f4a7c15ULL + v;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
  }
  return 2.0 * (double(x >> 11) * 0x1.0p-53) - 1.0;
}

// ---------------------------------------------------------------------------
// Serial reference transform for the oracle cross-check: direct DFT and
// cosine sums applied dimension by dimension, sharing nothing with the fast
// kernels.
// ---------------------------------------------------------------------------

std::vector<Complex> reference_forward(const GlobalGrid& g,
                                       const std::vector<double>& field,
                                       ThirdKind third) {
  const int nx = g.nx, ny = g.ny, nz = g.nz, nc = g.nc;
  auto at = [&](int k, int y, int z) {
    return std::size_t(k) + std::size_t(nc) * (y + std::size_t(ny) * z);
  };
  auto root = [](double num, double den) {
    const double ang = -2.0 * kPi * num / den;
    return Complex(std::cos(ang), std::sin(ang));
  };

  std::vector<Complex> a(std::size_t(nc) * ny * nz);
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int k = 0; k < nc; ++k) {
        Complex acc{0, 0};
        for (int x = 0; x < nx; ++x)
          acc += field[std::size_t(x) +
                       std::size_t(nx) * (y + std::size_t(ny) * z)] *
                 root(double(x) * k, nx);
        a[at(k, y, z)] = acc;
      }

  std::vector<Complex> line(std::max(ny, nz)), out(std::max(ny, nz));
  for (int z = 0; z < nz; ++z)
    for (int k = 0; k < nc; ++k) {
      for (int y = 0; y < ny; ++y) line[y] = a[at(k, y, z)];
      for (int m = 0; m < ny; ++m) {
        Complex acc{0, 0};
        for (int y = 0; y < ny; ++y) acc += line[y] * root(double(y) * m, ny);
        out[m] = acc;
      }
      for (int y = 0; y < ny; ++y) a[at(k, y, z)] = out[y];
    }

  if (third == ThirdKind::Empty) return a;
  for (int y = 0; y < ny; ++y)
    for (int k = 0; k < nc; ++k) {
      for (int z = 0; z < nz; ++z) line[z] = a[at(k, y, z)];
      if (third == ThirdKind::Fft) {
        for (int m = 0; m < nz; ++m) {
          Complex acc{0, 0};
          for (int z = 0; z < nz; ++z)
            acc += line[z] * root(double(z) * m, nz);
          out[m] = acc;
        }
      } else {  // Chebyshev coefficients by direct cosine sums, re/im apart
        const int l = nz - 1;
        for (int m = 0; m <= l; ++m) {
          Complex acc = 0.5 * line[0] + 0.5 * (m % 2 ? -line[l] : line[l]);
          for (int z = 1; z < l; ++z)
            acc += line[z] * std::cos(kPi * double(z) * m / l);
          out[m] = (2.0 / l) * acc;
        }
        out[0] *= 0.5;
        out[l] *= 0.5;
      }
      for (int z = 0; z < nz; ++z) a[at(k, y, z)] = out[z];
    }
  return a;
}

std::vector<std::pair<int, int>> procgrids_for(const BenchConfig& cfg) {
  const int p = cfg.ranks;
  switch (cfg.mode) {
    case GridMode::Explicit:
      return {{cfg.m1, cfg.m2}};
    case GridMode::Sweep: {
      std::vector<std::pair<int, int>> grids;
      for (int m1 = 1; m1 <= p; ++m1)
        if (p % m1 == 0) grids.emplace_back(m1, p / m1);
      return grids;
    }
    default: {  // Auto: smallest divisor of P holding a node's worth of rows
      int m1 = p;
      for (int d = 1; d <= p; ++d)
        if (p % d == 0 && d >= cfg.cores_per_node) {
          m1 = d;
          break;
        }
      return {{m1, p / m1}};
    }
  }
}

BenchRecord run_point(const BenchConfig& cfg, const GlobalGrid& grid, int m1,
                      int m2) {
  BenchRecord rec;
  rec.nx = cfg.nx;
  rec.ny = cfg.ny;
  rec.nz = cfg.nz;
  rec.p = cfg.ranks;
  rec.m1 = m1;
  rec.m2 = m2;
  rec.stride1 = cfg.stride1;
  rec.useeven = cfg.useeven;
  rec.third = cfg.third;
  rec.iters = cfg.iters;

  const ProcGrid pg{m1, m2};
  if (pg.size() != cfg.ranks) {
    rec.note = "m1*m2 does not equal the rank count";
    return rec;
  }
  if (auto violations = validate_procgrid(grid, pg); !violations.empty()) {
    std::string note;
    for (const auto& v : violations) note += (note.empty() ? "" : "; ") + v;
    rec.note = note;
    return rec;
  }

  const int p = pg.size();
  const PlanFlags flags{cfg.stride1, cfg.useeven, cfg.third, cfg.cache_block};
  // round-trip scale: the Chebyshev pair is self-inverse and the empty
  // transform contributes nothing, so only the FFT third kind scales by nz
  const double scale = cfg.third == ThirdKind::Fft
                           ? double(grid.volume())
                           : double(grid.nx) * grid.ny;

  std::vector<std::vector<double>> secs(p), comm(p);
  std::vector<double> err(p, 0.0), ref(p, 0.0);
  std::vector<std::vector<double>> oracle_in(p);
  std::vector<std::vector<Complex>> oracle_out(p);
  std::vector<PencilLayout> in_layouts(p), out_layouts(p);

  Harness h(p);
  h.run([&](Group& world) {
    const int me = world.index();
    auto [row, col] = split(world, pg);
    Plan plan(grid, pg, me, flags);
    in_layouts[me] = plan.input_layout();
    out_layouts[me] = plan.output_layout();

    RealField in = init_sine(grid, plan.input_layout());
    ComplexField spec = plan.make_output();
    RealField back = plan.make_input();

    for (int w = 0; w < cfg.warmup; ++w) {
      plan.forward(row, col, in, spec);
      plan.backward(row, col, spec, back);
    }
    secs[me].reserve(cfg.iters);
    comm[me].reserve(cfg.iters);
    for (int it = 0; it < cfg.iters; ++it) {
      world.barrier();
      TransformStats stats;
      const double t0 = now_seconds();
      plan.forward(row, col, in, spec, &stats);
      plan.backward(row, col, spec, back, &stats);
      secs[me].push_back(now_seconds() - t0);
      comm[me].push_back(stats.comm_seconds);
    }

    for (std::size_t i = 0; i < in.data.size(); ++i) {
      err[me] = std::max(err[me],
                         std::abs(back.data[i] - scale * in.data[i]));
      ref[me] = std::max(ref[me], std::abs(scale * in.data[i]));
    }

    if (cfg.oracle) {
      RealField rf{plan.input_layout(),
                   std::vector<double>(plan.input_layout().volume())};
      for (std::size_t i = 0; i < rf.data.size(); ++i) {
        const auto c = rf.layout.coords_of(i);
        rf.data[i] = hashed_unit(cfg.seed, c[0] + rf.layout.offset_of(Axis::X),
                                 c[1] + rf.layout.offset_of(Axis::Y),
                                 c[2] + rf.layout.offset_of(Axis::Z));
      }
      ComplexField rspec = plan.make_output();
      plan.forward(row, col, rf, rspec);
      oracle_in[me] = std::move(rf.data);
      oracle_out[me] = std::move(rspec.data);
    }
  });

  // per-iteration pair time is the slowest rank's; comm likewise
  double sum = 0, sum_comm = 0;
  rec.t_min = 1e300;
  rec.t_max = 0;
  for (int it = 0; it < cfg.iters; ++it) {
    double t_it = 0, c_it = 0;
    for (int r = 0; r < p; ++r) {
      t_it = std::max(t_it, secs[r][it]);
      c_it = std::max(c_it, comm[r][it]);
    }
    sum += t_it;
    sum_comm += c_it;
    rec.t_min = std::min(rec.t_min, t_it);
    rec.t_max = std::max(rec.t_max, t_it);
  }
  rec.t_mean = sum / cfg.iters;
  rec.t_comm_mean = sum_comm / cfg.iters;
  rec.flops = rec.t_mean > 0 ? model::flops_rate(grid, rec.t_mean) : 0.0;

  const double err_all = *std::max_element(err.begin(), err.end());
  const double ref_all = *std::max_element(ref.begin(), ref.end());
  rec.max_rel_err = err_all / std::max(ref_all, 1e-300);
  rec.pass = rec.max_rel_err < 1e-10;

  if (cfg.oracle) {
    // assemble the global field and spectrum from the pieces
    std::vector<double> field(grid.volume());
    for (int r = 0; r < p; ++r) {
      const auto& l = in_layouts[r];
      for (std::size_t i = 0; i < oracle_in[r].size(); ++i) {
        const auto c = l.coords_of(i);
        field[(c[0] + l.offset_of(Axis::X)) +
              std::size_t(grid.nx) *
                  ((c[1] + l.offset_of(Axis::Y)) +
                   std::size_t(grid.ny) * (c[2] + l.offset_of(Axis::Z)))] =
            oracle_in[r][i];
      }
    }
    std::vector<Complex> spec(grid.spectral_volume());
    for (int r = 0; r < p; ++r) {
      const auto& l = out_layouts[r];
      for (std::size_t i = 0; i < oracle_out[r].size(); ++i) {
        const auto c = l.coords_of(i);
        spec[(c[0] + l.offset_of(Axis::X)) +
             std::size_t(grid.nc) *
                 ((c[1] + l.offset_of(Axis::Y)) +
                  std::size_t(grid.ny) * (c[2] + l.offset_of(Axis::Z)))] =
            oracle_out[r][i];
      }
    }
    const auto want = reference_forward(grid, field, cfg.third);
    double diff = 0, mag = 0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      diff = std::max(diff, std::abs(spec[i] - want[i]));
      mag = std::max(mag, std::abs(want[i]));
    }
    const double rel = diff / std::max(mag, 1e-300);
    if (rel >= 1e-10) {
      rec.pass = false;
      char buf[96];
      std::snprintf(buf, sizeof buf,
                    "oracle cross-check failed: rel err %.3e", rel);
      rec.note = buf;
    }
  }
  return rec;
}

}  // namespace

RealField init_sine(const GlobalGrid& grid, const PencilLayout& layout) {
  RealField f{layout, std::vector<double>(layout.volume())};
  for (std::size_t i = 0; i < f.data.size(); ++i) {
    const auto c = layout.coords_of(i);
    const int gx = c[0] + layout.offset_of(Axis::X);
    const int gy = c[1] + layout.offset_of(Axis::Y);
    const int gz = c[2] + layout.offset_of(Axis::Z);
    f.data[i] = std::sin(2.0 * kPi * gx / grid.nx) *
                std::sin(2.0 * kPi * gy / grid.ny) *
                std::sin(2.0 * kPi * gz / grid.nz);
  }
  return f;
}

std::vector<BenchRecord> run(const BenchConfig& cfg) {
  if (cfg.iters < 1 || cfg.warmup < 0)
    throw std::invalid_argument("bench: need iters >= 1 and warmup >= 0");
  if (cfg.ranks < 1) throw std::invalid_argument("bench: need ranks >= 1");
  const GlobalGrid grid(cfg.nx, cfg.ny, cfg.nz);
  if (cfg.oracle && grid.volume() > kOracleMaxVolume)
    throw std::invalid_argument(
        "bench: the oracle cross-check is limited to grids up to 32^3");

  std::vector<BenchRecord> records;
  for (auto [m1, m2] : procgrids_for(cfg))
    records.push_back(run_point(cfg, grid, m1, m2));
  return records;
}

std::vector<BenchRecord> sweep_report(
    const std::vector<BenchRecord>& records) {
  using Key = std::tuple<int, int, int, int, bool, bool, ThirdKind>;
  std::vector<Key> order;
  std::map<Key, const BenchRecord*> best;
  for (const auto& r : records) {
    const Key key{r.nx, r.ny, r.nz, r.p, r.stride1, r.useeven, r.third};
    if (best.find(key) == best.end()) {
      order.push_back(key);
      best[key] = nullptr;
    }
    if (!r.pass) continue;
    const BenchRecord* cur = best[key];
    if (!cur || r.t_mean < cur->t_mean ||
        (r.t_mean == cur->t_mean && r.m1 < cur->m1))
      best[key] = &r;
  }
  std::vector<BenchRecord> result;
  for (const auto& key : order) {
    if (!best[key])
      throw std::invalid_argument(
          "sweep_report: a group has no passing record");
    result.push_back(*best[key]);
  }
  return result;
}

namespace {

std::string format_row(const BenchRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%d,%d,%d,%d,%d,%d,%d,%d,%s,%d,%.17g,%.17g,%.17g,%.17g,"
                "%.17g,%s,%.17g\n",
                r.nx, r.ny, r.nz, r.p, r.m1, r.m2, r.stride1 ? 1 : 0,
                r.useeven ? 1 : 0, to_string(r.third), r.iters, r.t_mean,
                r.t_min, r.t_max, r.t_comm_mean, r.max_rel_err,
                r.pass ? "true" : "false", r.flops);
  return buf;
}

}  // namespace

std::string csv_header() {
  return "nx,ny,nz,P,m1,m2,stride1,useeven,third,iters,t_mean,t_min,t_max,"
         "t_comm_mean,max_rel_err,pass,flops_rate";
}

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << csv_header() << "\n";
  for (const auto& r : records) out << format_row(r);
}

void append_csv(const std::string& path,
                const std::vector<BenchRecord>& records) {
  bool fresh = true;
  {
    std::ifstream probe(path);
    fresh = !probe.good() || probe.peek() == std::ifstream::traits_type::eof();
  }
  std::ofstream out(path, std::ios::app);
  if (!out)
    throw std::runtime_error("bench: cannot open " + path + " for writing");
  if (fresh) out << csv_header() << "\n";
  for (const auto& r : records) out << format_row(r);
}

}  // namespace pencilfft::bench
