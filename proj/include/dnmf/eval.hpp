#ifndef DNMF_EVAL_HPP_
#define DNMF_EVAL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dnmf/data.hpp"
#include "dnmf/matrix.hpp"

namespace dnmf {

// Disjoint, exhaustive train/test column splits. Every column lands in
// exactly one test fold.
struct SplitPlan {
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> train_idx;
  std::vector<std::vector<int>> test_idx;

  std::size_t folds() const { return test_idx.size(); }

  static SplitPlan k_fold(std::size_t n, int folds, std::uint64_t seed);
  // One shuffled holdout split (a single 80/20 fold by default).
  static SplitPlan single_holdout(std::size_t n, double test_fraction, std::uint64_t seed);
};

enum class Method { kDnmf, kMu };

struct EvalSettings {
  int k = 0;  // 0 = number of ground-truth signatures
  int layers = 10;
  int epochs = 500;
  double lr = 0.001;
  int mu_train_iters = 200;
  int mu_infer_iters = 100;
  int restarts = 1;
  std::uint64_t seed = 0;
  double lambda = 0.0;  // regularization for MU and for unsupervised DNMF
};

struct FoldResult {
  int fold = 0;
  double mse = 0.0;
  double train_seconds = 0.0;
  double infer_seconds = 0.0;
  std::vector<int> train_indices;
  std::vector<int> test_indices;
};
bool operator==(const FoldResult& a, const FoldResult& b);

struct EvalReport {
  std::string method;  // "dnmf" or "mu"
  std::string mode;    // "supervised" or "unsupervised"
  double lambda = 0.0;
  bool lambda_learned = false;  // supervised DNMF learns the lambdas
  std::vector<FoldResult> folds;
  double mean_mse = 0.0;
  double std_mse = 0.0;
};
bool operator==(const EvalReport& a, const EvalReport& b);

// Per fold: fit on the train columns, estimate H on the test columns, report
// mse_columns against the ground-truth H. DNMF trains on (V, H) pairs; MU
// learns W by factorizing the train matrix, then fixes it.
EvalReport evaluate_supervised(const MutationCatalog& catalog, Method method,
                               const EvalSettings& settings, const SplitPlan& plan);

// Per fold: learn W on the train columns (DNMF: NNLS estimate from the
// trained network; MU: factorize), estimate test H, report
// mse_columns(V_test, W * H_test).
EvalReport evaluate_unsupervised(const MutationCatalog& catalog, Method method, double lambda,
                                 const EvalSettings& settings, const SplitPlan& plan);

// CSV: one row per (method, lambda, fold) plus mean/std aggregate rows.
void write_reports_csv(const std::string& path, const std::vector<EvalReport>& reports);
// JSONL keeps full fidelity (including fold indices) and round-trips exactly.
void write_reports_jsonl(const std::string& path, const std::vector<EvalReport>& reports);
std::vector<EvalReport> read_reports_jsonl(const std::string& path);

}  // namespace dnmf

#endif  // DNMF_EVAL_HPP_
