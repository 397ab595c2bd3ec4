// Fits benchmark CSV records to the strong-scaling law a/P + d/P^(2/3) and
// reports the implied effective bisection bandwidth per configuration group.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pencilfft/perfmodel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"strong-scaling fit of pencil FFT benchmark records"};

  std::string in_path, out_path;
  double elem_bytes = 16.0;
  app.add_option("--in", in_path, "benchmark CSV to fit")->required();
  app.add_option("--out", out_path, "fit report CSV (default: stdout)");
  app.add_option("--elem-bytes", elem_bytes,
                 "bytes per exchanged element (complex double = 16)");

  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(in_path);
    if (!in) {
      std::fprintf(stderr, "error: cannot read %s\n", in_path.c_str());
      return 2;
    }
    auto rows = pencilfft::model::read_bench_csv(in);
    auto reports = pencilfft::model::fit_bench_records(rows, elem_bytes);
    if (reports.empty())
      std::fprintf(stderr,
                   "warning: no group has passing records at two or more "
                   "rank counts; nothing to fit\n");
    if (out_path.empty()) {
      pencilfft::model::write_fit_report(std::cout, reports);
    } else {
      std::ofstream out(out_path);
      pencilfft::model::write_fit_report(out, reports);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
