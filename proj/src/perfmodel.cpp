#include "pencilfft/perfmodel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pencilfft::model {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

double predict(const ModelParams& params, double n, double p) {
  require(n >= 1 && p >= 1, "predict: N and P must be at least 1");
  require(params.flops_per_sec > 0 && params.mem_accesses_per_elem > 0 &&
              params.mem_bytes_per_sec > 0 && params.contention > 0 &&
              params.elem_bytes > 0,
          "predict: model parameters must be strictly positive");
  const double sigma_bi = params.bisection_bw(p);
  require(sigma_bi > 0, "predict: bisection bandwidth must be positive");
  const double n3 = n * n * n;
  const double compute = 2.5 * std::log2(n) / (p * params.flops_per_sec);
  const double memory = params.mem_accesses_per_elem * params.elem_bytes /
                        (p * params.mem_bytes_per_sec);
  const double network =
      params.contention * params.elem_bytes / (2.0 * sigma_bi);
  return n3 * (compute + memory + network);
}

ScalingFit fit_strong_scaling(
    const std::vector<std::pair<double, double>>& pt) {
  std::set<double> distinct;
  double tnorm2 = 0;
  for (const auto& [p, t] : pt) {
    require(p >= 1, "fit: rank counts must be at least 1");
    require(t >= 0, "fit: times must be nonnegative");
    distinct.insert(p);
    tnorm2 += t * t;
  }
  require(distinct.size() >= 2, "fit: need samples at two distinct P values");
  require(tnorm2 > 0, "fit: all-zero times");

  // Weighted normal equations over the basis u = 1/P, v = P^(-2/3).
  // Timing noise is multiplicative, so residuals are weighted relative to
  // each sample; otherwise the largest time (smallest P) dominates a fit
  // spanning several decades.
  double suu = 0, suv = 0, svv = 0, sut = 0, svt = 0;
  for (const auto& [p, t] : pt) {
    const double w = t > 0 ? 1.0 / (t * t) : 1.0;
    const double u = 1.0 / p;
    const double v = std::pow(p, -2.0 / 3.0);
    suu += w * u * u;
    suv += w * u * v;
    svv += w * v * v;
    sut += w * u * t;
    svt += w * v * t;
  }
  auto residual_of = [&](double a, double d) {
    double r2 = 0;
    for (const auto& [p, t] : pt) {
      const double fit = a / p + d * std::pow(p, -2.0 / 3.0);
      r2 += (t - fit) * (t - fit);
    }
    return std::sqrt(r2 / tnorm2);
  };

  const double det = suu * svv - suv * suv;
  double a = 0, d = 0;
  if (det > 0) {
    a = (sut * svv - svt * suv) / det;
    d = (svt * suu - sut * suv) / det;
  }
  if (det <= 0 || a < 0 || d < 0) {
    // coefficients are physical times: clamp to the better single-term fit
    const double a_only = std::max(0.0, sut / suu);
    const double d_only = std::max(0.0, svt / svv);
    if (residual_of(a_only, 0) <= residual_of(0, d_only)) {
      a = a_only;
      d = 0;
    } else {
      a = 0;
      d = d_only;
    }
  }
  return ScalingFit{a, d, residual_of(a, d)};
}

ScalingFit fit_strong_scaling(const std::vector<TimingSample>& samples,
                              bool comm_time) {
  require(!samples.empty(), "fit: no samples");
  for (const auto& s : samples)
    require(s.nx == samples[0].nx && s.ny == samples[0].ny &&
                s.nz == samples[0].nz,
            "fit: samples must share one grid");
  std::vector<std::pair<double, double>> pt;
  pt.reserve(samples.size());
  for (const auto& s : samples)
    pt.emplace_back(double(s.p), comm_time ? s.t_comm : s.t_total);
  return fit_strong_scaling(pt);
}

double effective_bandwidth(double d, double ntot, double elem_bytes, double p,
                           int transposes) {
  require(ntot > 0 && elem_bytes > 0 && p >= 1 && transposes > 0,
          "effective_bandwidth: arguments must be positive");
  if (d <= 0)
    throw std::invalid_argument(
        "effective_bandwidth: undefined for a zero network coefficient");
  const double t_comm = d * std::pow(p, -2.0 / 3.0);
  return transposes * elem_bytes * ntot / (2.0 * t_comm);
}

double network_efficiency(double sigma_eff, double sigma_peak) {
  require(sigma_eff > 0 && sigma_peak > 0,
          "network_efficiency: bandwidths must be positive");
  return sigma_eff / sigma_peak;
}

std::vector<double> weak_scaling_efficiency(
    const TimingSample& base, const std::vector<TimingSample>& samples) {
  require(base.t_total > 0, "weak scaling: zero base time");
  require(base.ntot() > 1, "weak scaling: base grid too small");
  const double work_base = base.ntot() * std::log2(base.ntot());
  const double cost_base = base.p * base.t_total;
  std::vector<double> eff;
  eff.reserve(samples.size());
  for (const auto& s : samples) {
    require(s.t_total > 0, "weak scaling: zero sample time");
    const double work = s.ntot() * std::log2(s.ntot());
    const double cost = s.p * s.t_total;
    eff.push_back((work / work_base) / (cost / cost_base));
  }
  return eff;
}

double flops_rate(const GlobalGrid& grid, double t_pair_seconds) {
  require(t_pair_seconds > 0, "flops_rate: time must be positive");
  const double ntot = double(grid.volume());
  return 2.0 * 2.5 * ntot * std::log2(ntot) / t_pair_seconds;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  return fields;
}

bool parse_bool(const std::string& s) { return s == "1" || s == "true"; }

}  // namespace

std::vector<CsvTiming> read_bench_csv(std::istream& in) {
  std::vector<CsvTiming> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("nx,", 0) == 0) continue;  // header row
    }
    auto f = split_csv_line(line);
    if (f.size() != 17)
      throw std::invalid_argument("bench CSV: expected 17 fields, got " +
                                  std::to_string(f.size()));
    CsvTiming r;
    r.nx = std::stoi(f[0]);
    r.ny = std::stoi(f[1]);
    r.nz = std::stoi(f[2]);
    r.p = std::stoi(f[3]);
    r.m1 = std::stoi(f[4]);
    r.m2 = std::stoi(f[5]);
    r.stride1 = parse_bool(f[6]);
    r.useeven = parse_bool(f[7]);
    r.third = f[8];
    r.iters = std::stoi(f[9]);
    r.t_mean = std::stod(f[10]);
    r.t_min = std::stod(f[11]);
    r.t_max = std::stod(f[12]);
    r.t_comm_mean = std::stod(f[13]);
    r.max_rel_err = std::stod(f[14]);
    r.pass = parse_bool(f[15]);
    r.flops = std::stod(f[16]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<FitReport> fit_bench_records(const std::vector<CsvTiming>& rows,
                                         double elem_bytes) {
  using Key = std::tuple<int, int, int, bool, bool, std::string>;
  std::map<Key, std::map<int, CsvTiming>> best;  // group -> P -> best row
  for (const auto& r : rows) {
    if (!r.pass) continue;
    Key key{r.nx, r.ny, r.nz, r.stride1, r.useeven, r.third};
    auto& per_p = best[key];
    auto it = per_p.find(r.p);
    if (it == per_p.end() || r.t_mean < it->second.t_mean)
      per_p.insert_or_assign(r.p, r);
  }

  std::vector<FitReport> reports;
  for (const auto& [key, per_p] : best) {
    if (per_p.size() < 2) continue;  // nothing to fit
    FitReport rep;
    std::tie(rep.nx, rep.ny, rep.nz, rep.stride1, rep.useeven, rep.third) =
        key;
    std::vector<TimingSample> samples;
    for (const auto& [p, row] : per_p) samples.push_back(row.sample());
    rep.total = fit_strong_scaling(samples, false);
    const int p_max = per_p.rbegin()->first;
    const double ntot = samples[0].ntot();
    bool have_comm = std::any_of(samples.begin(), samples.end(),
                                 [](const auto& s) { return s.t_comm > 0; });
    if (have_comm) {
      rep.comm = fit_strong_scaling(samples, true);
      if (rep.comm.d > 0)
        rep.sigma_eff =
            effective_bandwidth(rep.comm.d, ntot, elem_bytes, p_max,
                                /*transposes=*/4);
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

void write_fit_report(std::ostream& out,
                      const std::vector<FitReport>& reports) {
  out << "nx,ny,nz,stride1,useeven,third,a,d,residual,a_comm,d_comm,"
         "residual_comm,sigma_eff\n";
  char buf[512];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf,
                  "%d,%d,%d,%d,%d,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g\n",
                  r.nx, r.ny, r.nz, r.stride1 ? 1 : 0, r.useeven ? 1 : 0,
                  r.third.c_str(), r.total.a, r.total.d, r.total.residual,
                  r.comm.a, r.comm.d, r.comm.residual, r.sigma_eff);
    out << buf;
  }
}

}  // namespace pencilfft::model
