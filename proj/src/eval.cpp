#include "dnmf/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

#include "dnmf/cost.hpp"
#include "dnmf/io_util.hpp"
#include "dnmf/mu.hpp"
#include "dnmf/nnls.hpp"
#include "dnmf/training.hpp"

namespace dnmf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<int> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

void finish_aggregates(EvalReport& report) {
  const std::size_t n = report.folds.size();
  double mean = 0.0;
  for (const FoldResult& f : report.folds) mean += f.mse;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const FoldResult& f : report.folds) var += (f.mse - mean) * (f.mse - mean);
  report.mean_mse = mean;
  report.std_mse = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
}

std::size_t resolve_k(const MutationCatalog& catalog, const EvalSettings& settings) {
  if (settings.k > 0) return static_cast<std::size_t>(settings.k);
  if (catalog.truth_h) return catalog.truth_h->rows();
  throw ConfigError("number of factors k is required when the catalog has no ground truth");
}

// Distinct deterministic MU seed per fold.
std::uint64_t fold_seed(const EvalSettings& settings, int fold) {
  return settings.seed + 0x51ed2701u * static_cast<std::uint64_t>(fold + 1);
}

MuConfig mu_train_config(const EvalSettings& settings, int fold, double lambda) {
  MuConfig cfg;
  cfg.max_iters = settings.mu_train_iters;
  cfg.reg = RegParams{lambda, lambda};
  // Fixed-value init keeps MU's factors rank-one (every column of W stays
  // identical), so the harness always factorizes from seeded random init.
  cfg.init = InitKind::kRandomUniform;
  cfg.seed = fold_seed(settings, fold);
  cfg.restarts = settings.restarts;
  return cfg;
}

MuConfig mu_infer_config(const EvalSettings& settings, double lambda) {
  MuConfig cfg = MuConfig::inference();
  cfg.max_iters = settings.mu_infer_iters;
  cfg.reg = RegParams{lambda, lambda};
  return cfg;
}

}  // namespace

SplitPlan SplitPlan::k_fold(std::size_t n, int folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("k_fold needs folds >= 2");
  if (n < static_cast<std::size_t>(folds))
    throw ConfigError("k_fold needs at least one column per fold");
  const std::vector<int> order = shuffled_indices(n, seed);
  SplitPlan plan;
  plan.seed = seed;
  std::size_t start = 0;
  for (int fold = 0; fold < folds; ++fold) {
    const std::size_t size = n / folds + (static_cast<std::size_t>(fold) < n % folds ? 1 : 0);
    std::vector<int> test(order.begin() + start, order.begin() + start + size);
    std::vector<int> train;
    train.reserve(n - size);
    train.insert(train.end(), order.begin(), order.begin() + start);
    train.insert(train.end(), order.begin() + start + size, order.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    plan.test_idx.push_back(std::move(test));
    plan.train_idx.push_back(std::move(train));
    start += size;
  }
  return plan;
}

SplitPlan SplitPlan::single_holdout(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ConfigError("test_fraction must be in (0,1)");
  const std::size_t test_n =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(test_fraction * n)));
  if (test_n >= n) throw ConfigError("holdout split leaves no training columns");
  const std::vector<int> order = shuffled_indices(n, seed);
  SplitPlan plan;
  plan.seed = seed;
  std::vector<int> test(order.begin(), order.begin() + test_n);
  std::vector<int> train(order.begin() + test_n, order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  plan.test_idx.push_back(std::move(test));
  plan.train_idx.push_back(std::move(train));
  return plan;
}

EvalReport evaluate_supervised(const MutationCatalog& catalog, Method method,
                               const EvalSettings& settings, const SplitPlan& plan) {
  if (!catalog.truth_h)
    throw ConfigError("supervised evaluation needs ground-truth H on the catalog");
  const std::size_t k = resolve_k(catalog, settings);
  if (catalog.truth_h->rows() != k)
    throw ConfigError("settings.k does not match the ground-truth H");
  const Matrix& v = catalog.counts;
  const Matrix& truth = *catalog.truth_h;

  EvalReport report;
  report.method = method == Method::kDnmf ? "dnmf" : "mu";
  report.mode = "supervised";
  report.lambda = settings.lambda;
  report.lambda_learned = method == Method::kDnmf;

  for (std::size_t fold = 0; fold < plan.folds(); ++fold) {
    const std::vector<int>& train = plan.train_idx[fold];
    const std::vector<int>& test = plan.test_idx[fold];
    const Matrix v_train = gather_columns(v, train);
    const Matrix v_test = gather_columns(v, test);
    const Matrix h_true_test = gather_columns(truth, test);

    FoldResult result;
    result.fold = static_cast<int>(fold);
    result.train_indices = train;
    result.test_indices = test;

    if (method == Method::kDnmf) {
      const Matrix h_train = gather_columns(truth, train);
      UnrolledModel model = UnrolledModel::ones_init(v.rows(), k,
                                                     static_cast<std::size_t>(settings.layers));
      TrainConfig cfg;
      cfg.epochs = settings.epochs;
      cfg.seed = fold_seed(settings, static_cast<int>(fold));
      AdamState adam = AdamState::init(model, settings.lr);
      auto t0 = Clock::now();
      SupervisedResult trained =
          train_supervised(v_train, h_train, std::move(model), cfg, std::move(adam));
      result.train_seconds = seconds_since(t0);
      t0 = Clock::now();
      const Matrix h_est = infer(trained.model, v_test);
      result.mse = mse_columns(h_est, h_true_test);
      result.infer_seconds = seconds_since(t0);
    } else {
      auto t0 = Clock::now();
      const FactorizationResult fact =
          factorize(v_train, k, mu_train_config(settings, static_cast<int>(fold), settings.lambda));
      result.train_seconds = seconds_since(t0);
      t0 = Clock::now();
      const Matrix h_est = infer_h(v_test, fact.w, mu_infer_config(settings, settings.lambda));
      result.mse = mse_columns(h_est, h_true_test);
      result.infer_seconds = seconds_since(t0);
    }
    report.folds.push_back(std::move(result));
  }
  finish_aggregates(report);
  return report;
}

EvalReport evaluate_unsupervised(const MutationCatalog& catalog, Method method, double lambda,
                                 const EvalSettings& settings, const SplitPlan& plan) {
  const std::size_t k = resolve_k(catalog, settings);
  const Matrix& v = catalog.counts;

  EvalReport report;
  report.method = method == Method::kDnmf ? "dnmf" : "mu";
  report.mode = "unsupervised";
  report.lambda = lambda;

  for (std::size_t fold = 0; fold < plan.folds(); ++fold) {
    const std::vector<int>& train = plan.train_idx[fold];
    const std::vector<int>& test = plan.test_idx[fold];
    const Matrix v_train = gather_columns(v, train);
    const Matrix v_test = gather_columns(v, test);

    FoldResult result;
    result.fold = static_cast<int>(fold);
    result.train_indices = train;
    result.test_indices = test;

    Matrix w;
    Matrix h_test;
    auto t0 = Clock::now();
    if (method == Method::kDnmf) {
      UnrolledModel model = UnrolledModel::ones_init(v.rows(), k,
                                                     static_cast<std::size_t>(settings.layers));
      model.reg = RegParams{lambda, lambda};
      model.learn_reg = false;
      TrainConfig cfg;
      cfg.epochs = settings.epochs;
      cfg.seed = fold_seed(settings, static_cast<int>(fold));
      AdamState adam = AdamState::init(model, settings.lr);
      UnsupervisedResult trained =
          train_unsupervised(v_train, std::move(model), cfg, std::move(adam));
      result.train_seconds = seconds_since(t0);
      t0 = Clock::now();
      w = std::move(trained.w);
      h_test = infer(trained.model, v_test);
    } else {
      const FactorizationResult fact =
          factorize(v_train, k, mu_train_config(settings, static_cast<int>(fold), lambda));
      result.train_seconds = seconds_since(t0);
      t0 = Clock::now();
      w = fact.w;
      h_test = infer_h(v_test, w, mu_infer_config(settings, lambda));
    }
    result.mse = mse_columns(v_test, matmul(w, h_test));
    result.infer_seconds = seconds_since(t0);
    report.folds.push_back(std::move(result));
  }
  finish_aggregates(report);
  return report;
}

bool operator==(const FoldResult& a, const FoldResult& b) {
  return a.fold == b.fold && a.mse == b.mse && a.train_seconds == b.train_seconds &&
         a.infer_seconds == b.infer_seconds && a.train_indices == b.train_indices &&
         a.test_indices == b.test_indices;
}

bool operator==(const EvalReport& a, const EvalReport& b) {
  return a.method == b.method && a.mode == b.mode && a.lambda == b.lambda &&
         a.lambda_learned == b.lambda_learned && a.folds == b.folds &&
         a.mean_mse == b.mean_mse && a.std_mse == b.std_mse;
}

void write_reports_csv(const std::string& path, const std::vector<EvalReport>& reports) {
  std::string out = "method,mode,lambda,fold,mse,train_seconds,infer_seconds\n";
  for (const EvalReport& r : reports) {
    const std::string lam = r.lambda_learned ? "learned" : format_double(r.lambda);
    for (const FoldResult& f : r.folds) {
      out += r.method + ',' + r.mode + ',' + lam + ',' + std::to_string(f.fold) + ',' +
             format_double(f.mse) + ',' + format_double(f.train_seconds) + ',' +
             format_double(f.infer_seconds) + '\n';
    }
    out += r.method + ',' + r.mode + ',' + lam + ",mean," + format_double(r.mean_mse) + ",,\n";
    out += r.method + ',' + r.mode + ',' + lam + ",std," + format_double(r.std_mse) + ",,\n";
  }
  write_text_atomic(path, out);
}

namespace {

nlohmann::json report_json(const EvalReport& r) {
  nlohmann::json folds = nlohmann::json::array();
  for (const FoldResult& f : r.folds)
    folds.push_back({{"fold", f.fold},
                     {"mse", f.mse},
                     {"train_seconds", f.train_seconds},
                     {"infer_seconds", f.infer_seconds},
                     {"train_indices", f.train_indices},
                     {"test_indices", f.test_indices}});
  return nlohmann::json{{"method", r.method},       {"mode", r.mode},
                        {"lambda", r.lambda},       {"lambda_learned", r.lambda_learned},
                        {"mean_mse", r.mean_mse},   {"std_mse", r.std_mse},
                        {"folds", std::move(folds)}};
}

EvalReport report_from_json(const nlohmann::json& doc) {
  EvalReport r;
  r.method = doc.at("method").get<std::string>();
  r.mode = doc.at("mode").get<std::string>();
  r.lambda = doc.at("lambda").get<double>();
  r.lambda_learned = doc.at("lambda_learned").get<bool>();
  r.mean_mse = doc.at("mean_mse").get<double>();
  r.std_mse = doc.at("std_mse").get<double>();
  for (const auto& entry : doc.at("folds")) {
    FoldResult f;
    f.fold = entry.at("fold").get<int>();
    f.mse = entry.at("mse").get<double>();
    f.train_seconds = entry.at("train_seconds").get<double>();
    f.infer_seconds = entry.at("infer_seconds").get<double>();
    f.train_indices = entry.at("train_indices").get<std::vector<int>>();
    f.test_indices = entry.at("test_indices").get<std::vector<int>>();
    r.folds.push_back(std::move(f));
  }
  return r;
}

}  // namespace

void write_reports_jsonl(const std::string& path, const std::vector<EvalReport>& reports) {
  std::string out;
  for (const EvalReport& r : reports) out += report_json(r).dump() + "\n";
  write_text_atomic(path, out);
}

std::vector<EvalReport> read_reports_jsonl(const std::string& path) {
  std::istringstream is(read_text(path));
  std::vector<EvalReport> reports;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      reports.push_back(report_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("report jsonl line " + std::to_string(line_no) + ": " + e.what(),
                       line_no, 1);
    }
  }
  return reports;
}

}  // namespace dnmf
