#include "dnmf/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "json.hpp"

#include "dnmf/io_util.hpp"

namespace dnmf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_train_config(const TrainConfig& cfg) {
  if (cfg.epochs < 0) throw ConfigError("epochs must be >= 0");
  if (cfg.batch_size < 0) throw ConfigError("batch_size must be >= 0");
  if (cfg.patience < 0) throw ConfigError("patience must be >= 0");
  if (!(cfg.floor >= 0.0)) throw ConfigError("projection floor must be >= 0");
}

void check_finite_grads(const UnrolledModel& model, const ParamGrads& grads) {
  for (std::size_t l = 0; l < model.depth(); ++l) {
    if (!all_finite(grads.grad_a[l]))
      throw NumericError("non-finite gradient for layer " + std::to_string(l) + " matrix A");
    if (!all_finite(grads.grad_b[l]))
      throw NumericError("non-finite gradient for layer " + std::to_string(l) + " matrix B");
  }
  if (!std::isfinite(grads.grad_lambda1)) throw NumericError("non-finite gradient for lambda1");
  if (!std::isfinite(grads.grad_lambda2)) throw NumericError("non-finite gradient for lambda2");
}

void adam_update_matrix(Matrix& param, const Matrix& grad, Matrix& m, Matrix& v,
                        const AdamState& st, double c1, double c2, double floor) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad.values()[i];
    double& mi = m.values()[i];
    double& vi = v.values()[i];
    mi = st.beta1 * mi + (1.0 - st.beta1) * g;
    vi = st.beta2 * vi + (1.0 - st.beta2) * g * g;
    const double mhat = mi / c1;
    const double vhat = vi / c2;
    double& p = param.values()[i];
    p -= st.lr * mhat / (std::sqrt(vhat) + st.eps);
    if (p < floor) p = floor;
  }
}

void adam_update_scalar(double& param, double grad, double& m, double& v, const AdamState& st,
                        double c1, double c2, double floor) {
  m = st.beta1 * m + (1.0 - st.beta1) * grad;
  v = st.beta2 * v + (1.0 - st.beta2) * grad * grad;
  param -= st.lr * (m / c1) / (std::sqrt(v / c2) + st.eps);
  if (param < floor) param = floor;
}

// Column batches for one epoch: a single full batch by default, otherwise
// shuffled chunks of cfg.batch_size.
std::vector<std::vector<int>> epoch_batches(std::size_t n, const TrainConfig& cfg,
                                            std::mt19937_64& rng) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (cfg.batch_size <= 0 || static_cast<std::size_t>(cfg.batch_size) >= n)
    return {order};
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<int>> batches;
  for (std::size_t start = 0; start < n; start += cfg.batch_size) {
    const std::size_t stop = std::min(n, start + cfg.batch_size);
    batches.emplace_back(order.begin() + start, order.begin() + stop);
  }
  return batches;
}

bool should_stop(const std::vector<double>& losses, int patience) {
  if (patience <= 0 || losses.empty()) return false;
  std::size_t best_at = 0;
  for (std::size_t i = 1; i < losses.size(); ++i)
    if (losses[i] < losses[best_at]) best_at = i;
  return losses.size() - 1 - best_at >= static_cast<std::size_t>(patience);
}

}  // namespace

AdamState AdamState::init(const UnrolledModel& model, double lr) {
  if (!(lr > 0.0)) throw ConfigError("learning rate must be > 0");
  AdamState st;
  st.lr = lr;
  st.m_a.assign(model.depth(), Matrix(model.k, model.f, 0.0));
  st.v_a.assign(model.depth(), Matrix(model.k, model.f, 0.0));
  st.m_b.assign(model.depth(), Matrix(model.k, model.k, 0.0));
  st.v_b.assign(model.depth(), Matrix(model.k, model.k, 0.0));
  return st;
}

void adam_step(UnrolledModel& model, const ParamGrads& grads, AdamState& state, double floor,
               bool update_reg) {
  if (state.m_a.size() != model.depth() || grads.grad_a.size() != model.depth())
    throw StateError("adam_step: state/gradient layer counts do not match the model");
  check_finite_grads(model, grads);
  state.step += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t l = 0; l < model.depth(); ++l) {
    adam_update_matrix(model.layers[l].a, grads.grad_a[l], state.m_a[l], state.v_a[l], state,
                       c1, c2, floor);
    adam_update_matrix(model.layers[l].b, grads.grad_b[l], state.m_b[l], state.v_b[l], state,
                       c1, c2, floor);
  }
  if (update_reg) {
    adam_update_scalar(model.reg.lambda1, grads.grad_lambda1, state.m_l1, state.v_l1, state,
                       c1, c2, floor);
    adam_update_scalar(model.reg.lambda2, grads.grad_lambda2, state.m_l2, state.v_l2, state,
                       c1, c2, floor);
  }
}

SupervisedResult train_supervised(const Matrix& v, const Matrix& targets, UnrolledModel model,
                                  const TrainConfig& cfg, AdamState adam,
                                  const TrainHooks& hooks) {
  check_train_config(cfg);
  const std::size_t n = v.cols();
  if (n < 1) throw DimensionError("train_supervised: no training columns");
  if (v.rows() != model.f)
    throw DimensionError("train_supervised: V has " + std::to_string(v.rows()) +
                         " rows but model.f = " + std::to_string(model.f));
  if (targets.rows() != model.k || targets.cols() != n)
    throw DimensionError("train_supervised: targets must be " + std::to_string(model.k) +
                         "x" + std::to_string(n));
  check_nonneg(v, "V");
  check_nonneg(targets, "targets");

  TrainTrace trace;
  std::mt19937_64 rng(cfg.seed);
  ParamGrads grads = ParamGrads::zeros_like(model);
  ForwardTape tape;
  Vector grad_out(model.k);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = Clock::now();
    double epoch_sq_err = 0.0;
    for (const std::vector<int>& batch : epoch_batches(n, cfg, rng)) {
      grads = ParamGrads::zeros_like(model);
      grads.grad_lambda1 = 0.0;
      grads.grad_lambda2 = 0.0;
      const double scale = 2.0 / static_cast<double>(batch.size());
      for (int j : batch) {
        const Vector col = v.column(static_cast<std::size_t>(j));
        const Vector out = forward(model, col, &tape);
        double sq = 0.0;
        for (std::size_t i = 0; i < model.k; ++i) {
          const double diff = out[i] - targets(i, static_cast<std::size_t>(j));
          sq += diff * diff;
          grad_out[i] = scale * diff;
        }
        epoch_sq_err += sq;
        backward_into(model, tape, col, grad_out, grads);
      }
      adam_step(model, grads, adam, cfg.floor, model.learn_reg);
      if (hooks.after_step) hooks.after_step(model);
    }
    trace.loss.push_back(epoch_sq_err / static_cast<double>(n));
    if (hooks.heldout_metric) trace.metric.push_back(hooks.heldout_metric(model));
    trace.seconds.push_back(seconds_since(t0));
    if (should_stop(trace.loss, cfg.patience)) break;
  }
  return SupervisedResult{std::move(model), std::move(trace), std::move(adam)};
}

UnsupervisedResult train_unsupervised(const Matrix& v, UnrolledModel model,
                                      const TrainConfig& cfg, AdamState adam,
                                      const NnlsConfig& nnls_cfg, const TrainHooks& hooks) {
  check_train_config(cfg);
  const std::size_t n = v.cols();
  if (n < 1) throw DimensionError("train_unsupervised: no training columns");
  if (v.rows() != model.f)
    throw DimensionError("train_unsupervised: V has " + std::to_string(v.rows()) +
                         " rows but model.f = " + std::to_string(model.f));
  check_nonneg(v, "V");

  TrainTrace trace;
  std::vector<ForwardTape> tapes(n);
  Matrix h(model.k, n);
  Matrix w;
  ParamGrads grads = ParamGrads::zeros_like(model);
  Vector grad_out(model.k);

  const int epochs = cfg.epochs;
  bool stop = false;
  for (int epoch = 0; epoch <= epochs; ++epoch) {
    const auto t0 = Clock::now();
    for (std::size_t j = 0; j < n; ++j) {
      const Vector col = v.column(j);
      const Vector out = forward(model, col, &tapes[j]);
      h.set_column(j, out);
    }
    w = estimate_w(v, h, nnls_cfg);
    // The last pass only refreshes W for the final model; no step follows.
    if (epoch == epochs || stop) break;

    const double loss = matrix_cost(v, w, h, model.reg) / static_cast<double>(n);

    // grad wrt h_j of the averaged cost, with W constant: (W'Wh - W'v +
    // lambda1 + lambda2 h) / n. h >= 0, so |h|_1 differentiates to 1.
    const Matrix wt = transpose(w);
    const Matrix gram = matmul(wt, w);
    const Matrix wtv = matmul(wt, v);
    const double inv_n = 1.0 / static_cast<double>(n);
    grads = ParamGrads::zeros_like(model);
    grads.grad_lambda1 = 0.0;
    grads.grad_lambda2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Vector col = v.column(j);
      const Vector hj = h.column(j);
      const Vector gh = matvec(gram, hj);
      for (std::size_t i = 0; i < model.k; ++i)
        grad_out[i] = (gh[i] - wtv(i, j) + model.reg.lambda1 + model.reg.lambda2 * hj[i]) * inv_n;
      backward_into(model, tapes[j], col, grad_out, grads);
    }
    adam_step(model, grads, adam, cfg.floor, /*update_reg=*/false);
    if (hooks.after_step) hooks.after_step(model);

    trace.loss.push_back(loss);
    if (hooks.heldout_metric) trace.metric.push_back(hooks.heldout_metric(model));
    trace.seconds.push_back(seconds_since(t0));
    stop = should_stop(trace.loss, cfg.patience);
  }
  return UnsupervisedResult{std::move(model), std::move(trace), std::move(adam), std::move(w)};
}

Matrix infer(const UnrolledModel& model, const Matrix& v) {
  if (v.rows() != model.f)
    throw DimensionError("infer: V has " + std::to_string(v.rows()) +
                         " rows but model.f = " + std::to_string(model.f));
  Matrix h(model.k, v.cols());
  for (std::size_t j = 0; j < v.cols(); ++j) h.set_column(j, forward(model, v.column(j)));
  return h;
}

void write_trace_csv(const std::string& path, const TrainTrace& trace) {
  std::string out = "epoch,loss,metric,seconds\n";
  for (std::size_t e = 0; e < trace.loss.size(); ++e) {
    out += std::to_string(e);
    out += ',';
    out += format_double(trace.loss[e]);
    out += ',';
    if (e < trace.metric.size()) out += format_double(trace.metric[e]);
    out += ',';
    out += e < trace.seconds.size() ? format_double(trace.seconds[e]) : "";
    out += '\n';
  }
  write_text_atomic(path, out);
}

namespace {

nlohmann::json adam_json(const AdamState& st) {
  nlohmann::json doc;
  doc["lr"] = st.lr;
  doc["beta1"] = st.beta1;
  doc["beta2"] = st.beta2;
  doc["eps"] = st.eps;
  doc["step"] = st.step;
  auto dump = [](const std::vector<Matrix>& ms) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Matrix& m : ms) arr.push_back(m.values());
    return arr;
  };
  doc["m_a"] = dump(st.m_a);
  doc["v_a"] = dump(st.v_a);
  doc["m_b"] = dump(st.m_b);
  doc["v_b"] = dump(st.v_b);
  doc["m_l1"] = st.m_l1;
  doc["v_l1"] = st.v_l1;
  doc["m_l2"] = st.m_l2;
  doc["v_l2"] = st.v_l2;
  return doc;
}

AdamState adam_from_json(const nlohmann::json& doc, const UnrolledModel& model) {
  AdamState st = AdamState::init(model, doc.at("lr").get<double>());
  st.beta1 = doc.at("beta1").get<double>();
  st.beta2 = doc.at("beta2").get<double>();
  st.eps = doc.at("eps").get<double>();
  st.step = doc.at("step").get<long>();
  auto load = [&](const char* key, std::vector<Matrix>& ms) {
    const auto& arr = doc.at(key);
    if (arr.size() != ms.size())
      throw ParseError("checkpoint: optimizer state does not match model depth", 1, 1);
    for (std::size_t l = 0; l < ms.size(); ++l) {
      if (arr[l].size() != ms[l].size())
        throw ParseError("checkpoint: moment size does not match model dims", 1, 1);
      for (std::size_t i = 0; i < ms[l].size(); ++i) ms[l].values()[i] = arr[l][i].get<double>();
    }
  };
  load("m_a", st.m_a);
  load("v_a", st.v_a);
  load("m_b", st.m_b);
  load("v_b", st.v_b);
  st.m_l1 = doc.at("m_l1").get<double>();
  st.v_l1 = doc.at("v_l1").get<double>();
  st.m_l2 = doc.at("m_l2").get<double>();
  st.v_l2 = doc.at("v_l2").get<double>();
  return st;
}

}  // namespace

void save_checkpoint(const std::string& path, const UnrolledModel& model,
                     const AdamState& adam) {
  nlohmann::json doc;
  doc["format"] = "dnmf-checkpoint";
  doc["version"] = 1;
  doc["model"] = nlohmann::json::parse(model_to_json(model));
  doc["adam"] = adam_json(adam);
  write_text_atomic(path, doc.dump() + "\n");
}

Checkpoint load_checkpoint(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint json: ") + e.what(), 1, 1);
  }
  if (doc.value("format", "") != "dnmf-checkpoint" || doc.value("version", -1) != 1)
    throw ParseError("not a dnmf-checkpoint document", 1, 1);
  try {
    UnrolledModel model = model_from_json(doc.at("model").dump());
    AdamState adam = adam_from_json(doc.at("adam"), model);
    return Checkpoint{std::move(model), std::move(adam)};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint json: ") + e.what(), 1, 1);
  }
}

}  // namespace dnmf
