#include "dnmf/unrolled.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "json.hpp"

#include "dnmf/io_util.hpp"

namespace dnmf {

namespace {

void check_model(const UnrolledModel& model) {
  if (model.depth() < 1) throw ConfigError("model must have at least one layer");
  if (model.f < 1 || model.k < 1) throw ConfigError("model dimensions must be positive");
  if (!(model.h0_value > 0.0)) throw ConfigError("h0_value must be > 0");
  check_reg(model.reg);
  for (std::size_t l = 0; l < model.depth(); ++l) {
    const LayerParams& p = model.layers[l];
    if (p.a.rows() != model.k || p.a.cols() != model.f || p.b.rows() != model.k ||
        p.b.cols() != model.k)
      throw DimensionError("layer " + std::to_string(l) + " matrices do not match model dims");
  }
}

// Computes one layer and records the intermediates into `step`.
void layer_step(const Vector& h, const Vector& v, const LayerParams& p, const RegParams& reg,
                LayerStep& step) {
  step.h_in = h;
  step.u = matvec(p.a, v);
  Vector d = matvec(p.b, h);
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = std::max(d[i] + reg.lambda1 + reg.lambda2 * h[i], kDivEps);
  step.d = std::move(d);
  Vector out(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) out[i] = h[i] * step.u[i] / step.d[i];
  step.h_out = std::move(out);
}

void layer_backward_accum(const LayerStep& step, const Vector& grad_out, const Vector& v,
                          const LayerParams& p, const RegParams& reg, Matrix& grad_a,
                          Matrix& grad_b, double& grad_l1, double& grad_l2, Vector& grad_h) {
  const std::size_t k = step.h_in.size();
  const std::size_t f = v.size();

  // s_i = g_i h_i u_i / d_i^2 carries every path through the denominator;
  // clamped entries are constants there, so s_i = 0 for them.
  Vector s(k), ratio(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double di = step.d[i];
    ratio[i] = grad_out[i] * step.h_in[i] / di;
    s[i] = di <= kDivEps ? 0.0 : ratio[i] * step.u[i] / di;
  }

  // d f_i / d A_im = h_i v_m / d_i
  for (std::size_t i = 0; i < k; ++i) {
    double* row = grad_a.data() + i * f;
    const double r = ratio[i];
    if (r == 0.0) continue;
    for (std::size_t m = 0; m < f; ++m) row[m] += r * v[m];
  }
  // d f_i / d B_im = -h_i u_i h_m / d_i^2
  for (std::size_t i = 0; i < k; ++i) {
    double* row = grad_b.data() + i * k;
    const double si = s[i];
    if (si == 0.0) continue;
    for (std::size_t m = 0; m < k; ++m) row[m] -= si * step.h_in[m];
  }
  for (std::size_t i = 0; i < k; ++i) {
    grad_l1 -= s[i];
    grad_l2 -= s[i] * step.h_in[i];
  }
  // d f_i / d h_j = delta_ij u_i/d_i - (h_i u_i/d_i^2)(B_ij + lambda2 delta_ij)
  grad_h.assign(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double acc = grad_out[j] * step.u[j] / step.d[j] - reg.lambda2 * s[j];
    for (std::size_t i = 0; i < k; ++i) acc -= s[i] * p.b(i, j);
    grad_h[j] = acc;
  }
}

}  // namespace

UnrolledModel UnrolledModel::ones_init(std::size_t f, std::size_t k, std::size_t depth,
                                       double value) {
  if (!(value > 0.0)) throw ConfigError("init value must be > 0");
  UnrolledModel model;
  model.f = f;
  model.k = k;
  model.reg = RegParams{value, value};
  model.h0_value = value;
  model.layers.assign(depth, LayerParams{Matrix(k, f, value), Matrix(k, k, value)});
  check_model(model);
  return model;
}

UnrolledModel UnrolledModel::from_dictionary(const Matrix& w, std::size_t depth,
                                             const RegParams& reg) {
  check_nonneg(w, "W");
  UnrolledModel model;
  model.f = w.rows();
  model.k = w.cols();
  model.reg = reg;
  const Matrix wt = transpose(w);
  model.layers.assign(depth, LayerParams{wt, matmul(wt, w)});
  check_model(model);
  return model;
}

Vector layer_forward(const Vector& h, const Vector& v, const LayerParams& p,
                     const RegParams& reg) {
  if (p.a.rows() != h.size() || p.a.cols() != v.size() || p.b.rows() != h.size() ||
      p.b.cols() != h.size())
    throw DimensionError("layer_forward: parameter shapes do not match h/v lengths");
  LayerStep step;
  layer_step(h, v, p, reg, step);
  return std::move(step.h_out);
}

Vector forward(const UnrolledModel& model, const Vector& v, ForwardTape* tape) {
  check_model(model);
  if (v.size() != model.f)
    throw DimensionError("forward: v has length " + std::to_string(v.size()) +
                         " but model.f = " + std::to_string(model.f));
  check_nonneg(v, "v");
  Vector h(model.k, model.h0_value);
  if (tape) {
    tape->steps.resize(model.depth());
    for (std::size_t l = 0; l < model.depth(); ++l) {
      layer_step(h, v, model.layers[l], model.reg, tape->steps[l]);
      h = tape->steps[l].h_out;
    }
    return h;
  }
  LayerStep scratch;
  for (std::size_t l = 0; l < model.depth(); ++l) {
    layer_step(h, v, model.layers[l], model.reg, scratch);
    h = scratch.h_out;
  }
  return h;
}

ParamGrads ParamGrads::zeros_like(const UnrolledModel& model) {
  ParamGrads g;
  g.grad_a.assign(model.depth(), Matrix(model.k, model.f, 0.0));
  g.grad_b.assign(model.depth(), Matrix(model.k, model.k, 0.0));
  return g;
}

void ParamGrads::add(const ParamGrads& other) {
  if (grad_a.size() != other.grad_a.size())
    throw DimensionError("ParamGrads::add: layer counts differ");
  for (std::size_t l = 0; l < grad_a.size(); ++l) {
    for (std::size_t i = 0; i < grad_a[l].size(); ++i)
      grad_a[l].values()[i] += other.grad_a[l].values()[i];
    for (std::size_t i = 0; i < grad_b[l].size(); ++i)
      grad_b[l].values()[i] += other.grad_b[l].values()[i];
  }
  grad_lambda1 += other.grad_lambda1;
  grad_lambda2 += other.grad_lambda2;
}

LayerGrads layer_backward(const LayerStep& step, const Vector& grad_out, const Vector& v,
                          const LayerParams& p, const RegParams& reg) {
  if (grad_out.size() != step.h_in.size())
    throw DimensionError("layer_backward: grad_out length does not match the tape entry");
  LayerGrads g;
  g.grad_a = Matrix(step.h_in.size(), v.size(), 0.0);
  g.grad_b = Matrix(step.h_in.size(), step.h_in.size(), 0.0);
  layer_backward_accum(step, grad_out, v, p, reg, g.grad_a, g.grad_b, g.grad_lambda1,
                       g.grad_lambda2, g.grad_h);
  return g;
}

void backward_into(const UnrolledModel& model, const ForwardTape& tape, const Vector& v,
                   const Vector& grad_out, ParamGrads& sink) {
  if (tape.steps.size() != model.depth())
    throw StateError("backward: tape depth " + std::to_string(tape.steps.size()) +
                     " does not match model depth " + std::to_string(model.depth()));
  if (v.size() != model.f || grad_out.size() != model.k)
    throw StateError("backward: v/grad_out lengths do not match the model");
  for (const LayerStep& step : tape.steps)
    if (step.h_in.size() != model.k)
      throw StateError("backward: tape entry does not match model width");
  if (sink.grad_a.size() != model.depth())
    throw DimensionError("backward: gradient sink does not match model depth");

  Vector g = grad_out;
  Vector g_prev;
  for (std::size_t l = model.depth(); l-- > 0;) {
    layer_backward_accum(tape.steps[l], g, v, model.layers[l], model.reg, sink.grad_a[l],
                         sink.grad_b[l], sink.grad_lambda1, sink.grad_lambda2, g_prev);
    std::swap(g, g_prev);
  }
}

ParamGrads backward(const UnrolledModel& model, const ForwardTape& tape, const Vector& v,
                    const Vector& grad_out) {
  ParamGrads sink = ParamGrads::zeros_like(model);
  backward_into(model, tape, v, grad_out, sink);
  return sink;
}

namespace {

constexpr int kModelVersion = 1;

nlohmann::json model_json(const UnrolledModel& model) {
  nlohmann::json doc;
  doc["format"] = "dnmf-model";
  doc["version"] = kModelVersion;
  doc["f"] = model.f;
  doc["k"] = model.k;
  doc["depth"] = model.depth();
  doc["lambda1"] = model.reg.lambda1;
  doc["lambda2"] = model.reg.lambda2;
  doc["h0_value"] = model.h0_value;
  doc["learn_reg"] = model.learn_reg;
  nlohmann::json layers = nlohmann::json::array();
  for (const LayerParams& p : model.layers)
    layers.push_back({{"A", p.a.values()}, {"B", p.b.values()}});
  doc["layers"] = std::move(layers);
  return doc;
}

UnrolledModel model_from(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("format", "") != "dnmf-model")
    throw ParseError("not a dnmf-model document", 1, 1);
  if (doc.value("version", -1) != kModelVersion)
    throw ParseError("unsupported dnmf-model version", 1, 1);
  UnrolledModel model;
  model.f = doc.at("f").get<std::size_t>();
  model.k = doc.at("k").get<std::size_t>();
  model.reg.lambda1 = doc.at("lambda1").get<double>();
  model.reg.lambda2 = doc.at("lambda2").get<double>();
  model.h0_value = doc.at("h0_value").get<double>();
  model.learn_reg = doc.value("learn_reg", true);
  const auto& layers = doc.at("layers");
  const std::size_t depth = doc.at("depth").get<std::size_t>();
  if (layers.size() != depth)
    throw ParseError("layer array does not match declared depth", 1, 1);
  for (const auto& entry : layers) {
    LayerParams p{Matrix(model.k, model.f), Matrix(model.k, model.k)};
    const auto& a = entry.at("A");
    const auto& b = entry.at("B");
    if (a.size() != p.a.size() || b.size() != p.b.size())
      throw ParseError("layer matrix size does not match model dims", 1, 1);
    for (std::size_t i = 0; i < p.a.size(); ++i) p.a.values()[i] = a[i].get<double>();
    for (std::size_t i = 0; i < p.b.size(); ++i) p.b.values()[i] = b[i].get<double>();
    check_nonneg(p.a, "A");
    check_nonneg(p.b, "B");
    model.layers.push_back(std::move(p));
  }
  check_model(model);
  return model;
}

}  // namespace

std::string model_to_json(const UnrolledModel& model) {
  check_model(model);
  return model_json(model).dump();
}

UnrolledModel model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model json: ") + e.what(), 1, 1);
  }
  try {
    return model_from(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model json: ") + e.what(), 1, 1);
  }
}

void save_model(const std::string& path, const UnrolledModel& model) {
  write_text_atomic(path, model_to_json(model) + "\n");
}

UnrolledModel load_model(const std::string& path) {
  return model_from_json(read_text(path));
}

}  // namespace dnmf
