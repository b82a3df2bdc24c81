#include "dnmf/bench.hpp"

#include <algorithm>
#include <chrono>

#include "dnmf/io_util.hpp"
#include "dnmf/mu.hpp"
#include "dnmf/training.hpp"
#include "dnmf/unrolled.hpp"

namespace dnmf {

namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
double median_seconds(int repeats, Fn&& fn) {
  std::vector<double> times;
  times.reserve(repeats);
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = Clock::now();
    fn();
    times.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

}  // namespace

std::vector<BenchRow> run_bench(const Matrix& v, const BenchConfig& cfg) {
  if (cfg.repeats < 1) throw ConfigError("bench repeats must be >= 1");
  const std::size_t n = v.cols();
  const UnrolledModel model =
      UnrolledModel::ones_init(v.rows(), cfg.k, static_cast<std::size_t>(cfg.layers));
  const Matrix w(v.rows(), cfg.k, 1.0);

  MuConfig mu_short = MuConfig::inference();
  mu_short.max_iters = cfg.mu_iters_short;
  mu_short.tol = 0.0;
  MuConfig mu_long = mu_short;
  mu_long.max_iters = cfg.mu_iters_long;

  std::vector<BenchRow> rows;
  {
    const double total = median_seconds(cfg.repeats, [&] { infer(model, v); });
    rows.push_back({"dnmf", cfg.layers, total, total / static_cast<double>(n)});
  }
  {
    const double total = median_seconds(cfg.repeats, [&] { infer_h(v, w, mu_short); });
    rows.push_back({"mu", cfg.mu_iters_short, total, total / static_cast<double>(n)});
  }
  {
    const double total = median_seconds(cfg.repeats, [&] { infer_h(v, w, mu_long); });
    rows.push_back({"mu", cfg.mu_iters_long, total, total / static_cast<double>(n)});
  }
  return rows;
}

void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows) {
  std::string out = "method,steps,total_seconds,per_column_seconds\n";
  for (const BenchRow& r : rows)
    out += r.method + ',' + std::to_string(r.steps) + ',' + format_double(r.total_seconds) +
           ',' + format_double(r.per_column_seconds) + '\n';
  write_text_atomic(path, out);
}

}  // namespace dnmf
