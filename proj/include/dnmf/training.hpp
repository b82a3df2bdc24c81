#ifndef DNMF_TRAINING_HPP_
#define DNMF_TRAINING_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dnmf/nnls.hpp"
#include "dnmf/unrolled.hpp"

namespace dnmf {

// ADAM first/second moment accumulators, one pair per parameter group.
struct AdamState {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<Matrix> m_a, v_a, m_b, v_b;
  double m_l1 = 0.0, v_l1 = 0.0, m_l2 = 0.0, v_l2 = 0.0;

  static AdamState init(const UnrolledModel& model, double lr = 0.001);
};

// Bias-corrected ADAM update followed by clamping every parameter to
// >= floor. Lambdas move only when update_reg is set. Non-finite gradients
// throw NumericError naming the parameter group.
void adam_step(UnrolledModel& model, const ParamGrads& grads, AdamState& state,
               double floor = 0.0, bool update_reg = true);

struct TrainConfig {
  int epochs = 500;
  int batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 0;
  double floor = 0.0;  // projection floor; 1e-8 avoids permanently dead units
  int patience = 0;    // epochs without improvement before stopping; 0 = off
};

struct TrainTrace {
  std::vector<double> loss;     // one per epoch run
  std::vector<double> metric;   // empty unless a held-out metric hook is set
  std::vector<double> seconds;  // wall clock per epoch
};

struct TrainHooks {
  std::function<double(const UnrolledModel&)> heldout_metric;  // evaluated per epoch
  std::function<void(const UnrolledModel&)> after_step;        // after every adam_step
};

struct SupervisedResult {
  UnrolledModel model;
  TrainTrace trace;
  AdamState adam;
};

// Minimizes the mean over training columns of |forward(v_j) - h'_j|^2.
// Lambdas train along with A, B when model.learn_reg is set.
SupervisedResult train_supervised(const Matrix& v, const Matrix& targets, UnrolledModel model,
                                  const TrainConfig& cfg, AdamState adam,
                                  const TrainHooks& hooks = {});

struct UnsupervisedResult {
  UnrolledModel model;
  TrainTrace trace;
  AdamState adam;
  Matrix w;  // last NNLS estimate
};

// Per epoch: forward all columns to form H, estimate W from V and H by NNLS,
// average the regularized reconstruction cost over columns, and backpropagate
// with W held constant. Lambdas stay frozen in this mode.
UnsupervisedResult train_unsupervised(const Matrix& v, UnrolledModel model,
                                      const TrainConfig& cfg, AdamState adam,
                                      const NnlsConfig& nnls_cfg = {},
                                      const TrainHooks& hooks = {});

// Columnwise forward pass gathered into H (k x n).
Matrix infer(const UnrolledModel& model, const Matrix& v);

// trace CSV: epoch,loss,metric,seconds (metric blank when absent).
void write_trace_csv(const std::string& path, const TrainTrace& trace);

// Checkpoint = model serialization plus optimizer state, versioned JSON.
void save_checkpoint(const std::string& path, const UnrolledModel& model,
                     const AdamState& adam);
struct Checkpoint {
  UnrolledModel model;
  AdamState adam;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace dnmf

#endif  // DNMF_TRAINING_HPP_
