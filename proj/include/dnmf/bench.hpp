#ifndef DNMF_BENCH_HPP_
#define DNMF_BENCH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dnmf/matrix.hpp"

namespace dnmf {

struct BenchConfig {
  int repeats = 20;  // median-of-R timing
  int layers = 10;
  int mu_iters_short = 10;
  int mu_iters_long = 100;
  std::size_t k = 5;
};

struct BenchRow {
  std::string method;  // "dnmf" or "mu"
  int steps = 0;       // layers or iterations
  double total_seconds = 0.0;
  double per_column_seconds = 0.0;
};

// Times full-matrix inference for a depth-`layers` network forward pass and
// for fixed-iteration MU (tol = 0, so iteration counts are exact) on the
// same input.
std::vector<BenchRow> run_bench(const Matrix& v, const BenchConfig& cfg);

void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows);

}  // namespace dnmf

#endif  // DNMF_BENCH_HPP_
