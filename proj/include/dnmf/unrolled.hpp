#ifndef DNMF_UNROLLED_HPP_
#define DNMF_UNROLLED_HPP_

#include <string>
#include <vector>

#include "dnmf/cost.hpp"
#include "dnmf/matrix.hpp"

namespace dnmf {

// One layer's matrices. A (k x f) plays the role of W', B (k x k) the role of
// W'W, learned independently.
struct LayerParams {
  Matrix a;
  Matrix b;
};

struct UnrolledModel {
  std::size_t f = 0;
  std::size_t k = 0;
  std::vector<LayerParams> layers;
  RegParams reg;         // shared across layers
  double h0_value = 1.0; // fixed, not trained
  bool learn_reg = true; // trainers freeze lambdas when false

  std::size_t depth() const { return layers.size(); }

  // Every A, B entry and both lambdas set to `value` (default 1), the paper's
  // fixed positive initialization.
  static UnrolledModel ones_init(std::size_t f, std::size_t k, std::size_t depth = 10,
                                 double value = 1.0);

  // A = W', B = W'W in every layer: the network that reproduces `depth`
  // regularized multiplicative updates exactly.
  static UnrolledModel from_dictionary(const Matrix& w, std::size_t depth,
                                       const RegParams& reg);
};

// Cached per-layer intermediates from one forward pass: input h, numerator
// u = A v, clamped denominator d = B h + lambda1 + lambda2 h, and output.
struct LayerStep {
  Vector h_in;
  Vector u;
  Vector d;
  Vector h_out;
};

struct ForwardTape {
  std::vector<LayerStep> steps;
  const Vector& output() const { return steps.back().h_out; }
};

// h .* (A v) ./ (B h + lambda1 + lambda2 h), denominator clamped at kDivEps.
Vector layer_forward(const Vector& h, const Vector& v, const LayerParams& p,
                     const RegParams& reg);

// Propagates v through all layers from h0 = h0_value * ones. Pass a tape to
// record intermediates for the backward pass.
Vector forward(const UnrolledModel& model, const Vector& v, ForwardTape* tape = nullptr);

struct LayerGrads {
  Vector grad_h;  // with respect to the layer input
  Matrix grad_a;
  Matrix grad_b;
  double grad_lambda1 = 0.0;
  double grad_lambda2 = 0.0;
};

// Gradients for every model parameter; lambda gradients are summed over
// layers since the lambdas are shared.
struct ParamGrads {
  std::vector<Matrix> grad_a;
  std::vector<Matrix> grad_b;
  double grad_lambda1 = 0.0;
  double grad_lambda2 = 0.0;

  static ParamGrads zeros_like(const UnrolledModel& model);
  void add(const ParamGrads& other);
};

// Vector-Jacobian products of one layer. Entries whose denominator was
// clamped contribute no gradient through d.
LayerGrads layer_backward(const LayerStep& step, const Vector& grad_out, const Vector& v,
                          const LayerParams& p, const RegParams& reg);

// Full reverse sweep over a tape recorded by forward() on the same model/v.
ParamGrads backward(const UnrolledModel& model, const ForwardTape& tape, const Vector& v,
                    const Vector& grad_out);
void backward_into(const UnrolledModel& model, const ForwardTape& tape, const Vector& v,
                   const Vector& grad_out, ParamGrads& sink);

// Versioned JSON container; round-trips every double exactly.
std::string model_to_json(const UnrolledModel& model);
UnrolledModel model_from_json(const std::string& text);
void save_model(const std::string& path, const UnrolledModel& model);
UnrolledModel load_model(const std::string& path);

}  // namespace dnmf

#endif  // DNMF_UNROLLED_HPP_
