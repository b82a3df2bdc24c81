#ifndef DNMF_MU_HPP_
#define DNMF_MU_HPP_

#include <cstdint>

#include "dnmf/cost.hpp"
#include "dnmf/matrix.hpp"

namespace dnmf {

enum class InitKind {
  kFixed,          // every entry set to init_value
  kRandomUniform,  // seeded uniform(0,1] entries
};

struct MuConfig {
  int max_iters = 200;  // 100 is the fixed-W inference default, see inference()
  double tol = 1e-8;    // relative cost-change stopping threshold
  RegParams reg;
  double init_value = 1.0;
  InitKind init = InitKind::kFixed;
  std::uint64_t seed = 0;
  int restarts = 1;  // best-cost result wins, ties broken by lowest index

  static MuConfig inference() {
    MuConfig cfg;
    cfg.max_iters = 100;
    return cfg;
  }
};

struct FactorizationResult {
  Matrix w;
  Matrix h;
  std::vector<double> cost_trace;  // one entry per iteration
  int iters_run = 0;
};

// H <- H .* (W'V) ./ (W'WH + lambda1 + lambda2*H)
Matrix update_h(const Matrix& h, const Matrix& w, const Matrix& v, const RegParams& reg);

// W <- W .* (VH') ./ (WHH')
Matrix update_w(const Matrix& w, const Matrix& h, const Matrix& v);

// Alternating update_h/update_w from the configured init until the relative
// cost change drops below tol or max_iters is reached.
FactorizationResult factorize(const Matrix& v, std::size_t k, const MuConfig& cfg);

// Repeated update_h with W held fixed.
FactorizationResult infer_h_traced(const Matrix& v, const Matrix& w, const MuConfig& cfg);
Matrix infer_h(const Matrix& v, const Matrix& w, const MuConfig& cfg);

}  // namespace dnmf

#endif  // DNMF_MU_HPP_
