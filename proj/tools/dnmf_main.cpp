// Command line for the DNMF library: synthetic data generation, training,
// evaluation against the multiplicative-update baseline, and timing.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dnmf/bench.hpp"
#include "dnmf/data.hpp"
#include "dnmf/eval.hpp"
#include "dnmf/io_util.hpp"
#include "dnmf/mu.hpp"
#include "dnmf/training.hpp"

namespace fs = std::filesystem;
using namespace dnmf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitIo = 5;

int log_level() {
  const char* env = std::getenv("DNMF_LOG");
  if (!env) return 1;
  const std::string v(env);
  if (v == "quiet") return 0;
  if (v == "debug") return 2;
  return 1;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[dnmf] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[dnmf:debug] " << msg << "\n";
}

struct CommonOpts {
  std::string input;
  std::string output_dir;
  std::string targets;
  std::string mode = "supervised";
  std::string method = "both";
  std::string noise = "none";
  std::vector<double> lambdas;
  double lambda = 0.0;
  std::size_t f = 96;
  std::size_t k = 0;
  std::size_t n = 0;
  int layers = 10;
  int epochs = 500;
  int folds = 5;
  int restarts = 1;
  int repeats = 20;
  std::uint64_t seed = 0;
  double mutations = 600.0;
  bool require96 = false;
};

void ensure_output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output dir " + dir + ": " + ec.message());
}

std::vector<std::string> signature_names(std::size_t k) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < k; ++i) names.push_back("sig_" + std::to_string(i + 1));
  return names;
}

// The ground-truth H sidecar lives next to the catalog as H.csv unless
// overridden with --targets.
std::optional<std::string> resolve_targets(const CommonOpts& opts) {
  if (!opts.targets.empty()) {
    if (!fs::exists(opts.targets)) throw IoError("targets file not found: " + opts.targets);
    return opts.targets;
  }
  const fs::path sidecar = fs::path(opts.input).parent_path() / "H.csv";
  if (fs::exists(sidecar)) return sidecar.string();
  return std::nullopt;
}

Matrix load_targets_for(const MutationCatalog& catalog, const std::string& path) {
  const LabeledCsv csv = read_labeled_csv(path);
  if (csv.values.cols() != catalog.counts.cols())
    throw ConfigError("targets have " + std::to_string(csv.values.cols()) +
                      " columns but the catalog has " + std::to_string(catalog.counts.cols()));
  check_nonneg(csv.values, "targets");
  return csv.values;
}

int cmd_generate(const CommonOpts& opts) {
  GenConfig cfg;
  cfg.f = opts.f;
  cfg.k = opts.k;
  cfg.n = opts.n;
  cfg.seed = opts.seed;
  cfg.noise = opts.noise == "poisson" ? Noise::kPoisson : Noise::kNone;
  cfg.mutations_per_sample = opts.mutations;
  const MutationCatalog cat = generate_synthetic(cfg);

  ensure_output_dir(opts.output_dir);
  const fs::path dir(opts.output_dir);
  const std::vector<std::string> sigs = signature_names(cfg.k);
  write_labeled_csv((dir / "V.csv").string(), cat.labels, cat.sample_ids, cat.counts);
  write_labeled_csv((dir / "W.csv").string(), cat.labels, sigs, *cat.truth_w);
  write_labeled_csv((dir / "H.csv").string(), sigs, cat.sample_ids, *cat.truth_h);
  nlohmann::json meta(cat.meta);
  write_text_atomic((dir / "metadata.json").string(), meta.dump(2) + "\n");
  log_info("wrote " + std::to_string(cfg.f) + "x" + std::to_string(cfg.n) + " catalog to " +
           opts.output_dir);
  return kExitOk;
}

int cmd_train(const CommonOpts& opts) {
  const MutationCatalog cat = load_catalog(opts.input, opts.require96);
  ensure_output_dir(opts.output_dir);
  const fs::path dir(opts.output_dir);

  TrainConfig cfg;
  cfg.epochs = opts.epochs;
  cfg.seed = opts.seed;

  if (opts.mode == "supervised") {
    const auto targets_path = resolve_targets(opts);
    if (!targets_path)
      throw ConfigError("supervised training needs a ground-truth H sidecar "
                        "(H.csv next to the input, or --targets)");
    const Matrix targets = load_targets_for(cat, *targets_path);
    UnrolledModel model = UnrolledModel::ones_init(cat.counts.rows(), targets.rows(),
                                                   static_cast<std::size_t>(opts.layers));
    AdamState adam = AdamState::init(model);
    log_info("supervised training: n=" + std::to_string(cat.counts.cols()) +
             " k=" + std::to_string(targets.rows()) + " layers=" + std::to_string(opts.layers));
    SupervisedResult res = train_supervised(cat.counts, targets, std::move(model), cfg, std::move(adam));
    save_checkpoint((dir / "checkpoint.json").string(), res.model, res.adam);
    write_trace_csv((dir / "trace.csv").string(), res.trace);
    log_info("final training loss " + format_double(res.trace.loss.back()));
  } else {
    if (opts.k < 1) throw ConfigError("unsupervised training needs --k");
    UnrolledModel model = UnrolledModel::ones_init(cat.counts.rows(), opts.k,
                                                   static_cast<std::size_t>(opts.layers));
    model.reg = RegParams{opts.lambda, opts.lambda};
    model.learn_reg = false;
    AdamState adam = AdamState::init(model);
    log_info("unsupervised training: n=" + std::to_string(cat.counts.cols()) +
             " k=" + std::to_string(opts.k) + " lambda=" + format_double(opts.lambda));
    UnsupervisedResult res = train_unsupervised(cat.counts, std::move(model), cfg, std::move(adam));
    save_checkpoint((dir / "checkpoint.json").string(), res.model, res.adam);
    write_trace_csv((dir / "trace.csv").string(), res.trace);
    write_labeled_csv((dir / "W_nnls.csv").string(), cat.labels, signature_names(opts.k), res.w);
    log_info("final cost " + format_double(res.trace.loss.back()));
  }
  return kExitOk;
}

int cmd_eval(const CommonOpts& opts) {
  MutationCatalog cat = load_catalog(opts.input, opts.require96);
  const auto targets_path = resolve_targets(opts);
  if (targets_path) cat.truth_h = load_targets_for(cat, *targets_path);

  EvalSettings settings;
  settings.k = static_cast<int>(opts.k);
  settings.layers = opts.layers;
  settings.epochs = opts.epochs;
  settings.restarts = opts.restarts;
  settings.seed = opts.seed;

  const SplitPlan plan = SplitPlan::k_fold(cat.counts.cols(), opts.folds, opts.seed);
  const bool run_dnmf = opts.method == "dnmf" || opts.method == "both";
  const bool run_mu = opts.method == "mu" || opts.method == "both";

  std::vector<double> lambdas = opts.lambdas;
  std::vector<EvalReport> reports;
  if (opts.mode == "supervised") {
    if (!cat.truth_h)
      throw ConfigError("supervised evaluation needs a ground-truth H sidecar "
                        "(H.csv next to the input, or --targets)");
    if (lambdas.empty()) lambdas = {0.0, 0.1, 1.0, 10.0};
    if (run_dnmf) {
      log_debug("evaluating dnmf supervised");
      reports.push_back(evaluate_supervised(cat, Method::kDnmf, settings, plan));
    }
    if (run_mu) {
      for (double lam : lambdas) {
        log_debug("evaluating mu supervised lambda=" + format_double(lam));
        EvalSettings s = settings;
        s.lambda = lam;
        reports.push_back(evaluate_supervised(cat, Method::kMu, s, plan));
      }
    }
  } else {
    if (lambdas.empty()) lambdas = {0.0, 1.0, 2.0};
    for (double lam : lambdas) {
      if (run_dnmf) {
        log_debug("evaluating dnmf unsupervised lambda=" + format_double(lam));
        reports.push_back(evaluate_unsupervised(cat, Method::kDnmf, lam, settings, plan));
      }
      if (run_mu) {
        log_debug("evaluating mu unsupervised lambda=" + format_double(lam));
        reports.push_back(evaluate_unsupervised(cat, Method::kMu, lam, settings, plan));
      }
    }
  }

  ensure_output_dir(opts.output_dir);
  const fs::path dir(opts.output_dir);
  write_reports_csv((dir / "report.csv").string(), reports);
  write_reports_jsonl((dir / "report.jsonl").string(), reports);
  for (const EvalReport& r : reports) {
    std::cout << r.method << " " << r.mode << " lambda="
              << (r.lambda_learned ? std::string("learned") : format_double(r.lambda))
              << " mean_mse=" << format_double(r.mean_mse)
              << " std=" << format_double(r.std_mse) << "\n";
  }
  log_info("wrote report.csv and report.jsonl to " + opts.output_dir);
  return kExitOk;
}

int cmd_bench(const CommonOpts& opts) {
  Matrix v;
  if (!opts.input.empty()) {
    v = load_catalog(opts.input, opts.require96).counts;
  } else {
    GenConfig cfg;
    cfg.k = opts.k > 0 ? opts.k : 5;
    cfg.n = opts.n > 0 ? opts.n : 500;
    cfg.seed = opts.seed;
    v = generate_synthetic(cfg).counts;
  }
  BenchConfig cfg;
  cfg.repeats = opts.repeats;
  cfg.layers = opts.layers;
  cfg.k = opts.k > 0 ? opts.k : 5;
  const std::vector<BenchRow> rows = run_bench(v, cfg);
  std::cout << "method,steps,total_seconds,per_column_seconds\n";
  for (const BenchRow& r : rows)
    std::cout << r.method << ',' << r.steps << ',' << format_double(r.total_seconds) << ','
              << format_double(r.per_column_seconds) << "\n";
  if (!opts.output_dir.empty()) {
    ensure_output_dir(opts.output_dir);
    write_bench_csv((fs::path(opts.output_dir) / "bench.csv").string(), rows);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized NMF: multiplicative updates and a deep unrolled network"};
  app.require_subcommand(1);
  CommonOpts opts;

  CLI::App* gen = app.add_subcommand("generate", "Write a synthetic catalog with ground truth");
  gen->add_option("--output-dir", opts.output_dir)->required();
  gen->add_option("--k", opts.k)->required();
  gen->add_option("--n", opts.n)->required();
  gen->add_option("--f", opts.f);
  gen->add_option("--seed", opts.seed);
  gen->add_option("--noise", opts.noise)->check(CLI::IsMember({"none", "poisson"}));
  gen->add_option("--mutations", opts.mutations, "mean mutations per sample");

  CLI::App* train = app.add_subcommand("train", "Train a DNMF model on a catalog");
  train->add_option("--input", opts.input)->required();
  train->add_option("--output-dir", opts.output_dir)->required();
  train->add_option("--mode", opts.mode)->required()->check(CLI::IsMember({"supervised", "unsupervised"}));
  train->add_option("--targets", opts.targets, "ground-truth H sidecar");
  train->add_option("--k", opts.k);
  train->add_option("--layers", opts.layers);
  train->add_option("--lambda", opts.lambda);
  train->add_option("--epochs", opts.epochs);
  train->add_option("--seed", opts.seed);
  train->add_flag("--require-96", opts.require96, "enforce the 96-category catalog format");

  CLI::App* eval = app.add_subcommand("eval", "Cross-validated DNMF vs MU comparison");
  eval->add_option("--input", opts.input)->required();
  eval->add_option("--output-dir", opts.output_dir)->required();
  eval->add_option("--mode", opts.mode)->required()->check(CLI::IsMember({"supervised", "unsupervised"}));
  eval->add_option("--method", opts.method)->check(CLI::IsMember({"dnmf", "mu", "both"}));
  eval->add_option("--lambdas", opts.lambdas)->delimiter(',');
  eval->add_option("--targets", opts.targets);
  eval->add_option("--k", opts.k);
  eval->add_option("--folds", opts.folds);
  eval->add_option("--epochs", opts.epochs);
  eval->add_option("--layers", opts.layers);
  eval->add_option("--seed", opts.seed);
  eval->add_option("--restarts", opts.restarts);
  eval->add_flag("--require-96", opts.require96);

  CLI::App* bench = app.add_subcommand("bench", "Inference timing: DNMF vs MU");
  bench->add_option("--input", opts.input);
  bench->add_option("--k", opts.k);
  bench->add_option("--n", opts.n);
  bench->add_option("--layers", opts.layers);
  bench->add_option("--repeats", opts.repeats);
  bench->add_option("--seed", opts.seed);
  bench->add_option("--output-dir", opts.output_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(opts);
    if (train->parsed()) return cmd_train(opts);
    if (eval->parsed()) return cmd_eval(opts);
    if (bench->parsed()) return cmd_bench(opts);
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const DegenerateDictionaryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const IterationLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
