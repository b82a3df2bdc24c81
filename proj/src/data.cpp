#include "dnmf/data.hpp"

#include <algorithm>
#include <charconv>
#include <random>
#include <set>
#include <sstream>

#include "dnmf/io_util.hpp"

namespace dnmf {

std::vector<std::string> trinucleotide_labels() {
  static const char* kSubs[] = {"C>A", "C>G", "C>T", "T>A", "T>C", "T>G"};
  static const char kBases[] = {'A', 'C', 'G', 'T'};
  std::vector<std::string> labels;
  labels.reserve(96);
  for (const char* sub : kSubs)
    for (char five : kBases)
      for (char three : kBases)
        labels.push_back(std::string(1, five) + "[" + sub + "]" + three);
  return labels;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line, std::size_t column) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParseError("cannot parse number '" + cell + "' at line " + std::to_string(line) +
                         ", column " + std::to_string(column),
                     line, column);
  return value;
}

}  // namespace

LabeledCsv read_labeled_csv(const std::string& path) {
  const std::string text = read_text(path);
  LabeledCsv out;
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  std::size_t cols = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (line_no == 1) {
      if (cells.size() < 2)
        throw ParseError("header needs a label column and at least one sample", 1, 1);
      out.column_ids.assign(cells.begin() + 1, cells.end());
      cols = out.column_ids.size();
      continue;
    }
    if (cells.size() != cols + 1)
      throw ParseError("expected " + std::to_string(cols + 1) + " cells at line " +
                           std::to_string(line_no) + ", found " + std::to_string(cells.size()),
                       line_no, cells.size());
    out.row_labels.push_back(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c)
      values.push_back(parse_cell(cells[c], line_no, c + 1));
  }
  if (out.row_labels.empty()) throw ParseError("no data rows", line_no, 1);
  out.values = Matrix(out.row_labels.size(), cols);
  out.values.values() = std::move(values);
  return out;
}

void write_labeled_csv(const std::string& path, const std::vector<std::string>& row_labels,
                       const std::vector<std::string>& column_ids, const Matrix& values) {
  if (row_labels.size() != values.rows() || column_ids.size() != values.cols())
    throw DimensionError("write_labeled_csv: label counts do not match the matrix");
  std::string out = "category";
  for (const std::string& id : column_ids) {
    out += ',';
    out += id;
  }
  out += '\n';
  for (std::size_t i = 0; i < values.rows(); ++i) {
    out += row_labels[i];
    for (std::size_t j = 0; j < values.cols(); ++j) {
      out += ',';
      out += format_double(values(i, j));
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

MutationCatalog load_catalog(const std::string& path, bool require96) {
  LabeledCsv csv = read_labeled_csv(path);
  if (require96 && csv.row_labels.size() != 96)
    throw ParseError("catalog must have exactly 96 category rows, found " +
                         std::to_string(csv.row_labels.size()),
                     csv.row_labels.size() + 1, 1);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < csv.row_labels.size(); ++i)
    if (!seen.insert(csv.row_labels[i]).second)
      throw ParseError("duplicate category label '" + csv.row_labels[i] + "' at line " +
                           std::to_string(i + 2),
                       i + 2, 1);
  for (std::size_t i = 0; i < csv.values.rows(); ++i)
    for (std::size_t j = 0; j < csv.values.cols(); ++j)
      if (csv.values(i, j) < 0.0)
        throw ParseError("negative count " + format_double(csv.values(i, j)) + " at line " +
                             std::to_string(i + 2) + ", column " + std::to_string(j + 2) +
                             " (sample " + csv.column_ids[j] + ")",
                         i + 2, j + 2);
  MutationCatalog cat;
  cat.labels = std::move(csv.row_labels);
  cat.sample_ids = std::move(csv.column_ids);
  cat.counts = std::move(csv.values);
  return cat;
}

MutationCatalog generate_synthetic(const GenConfig& cfg) {
  if (cfg.f < 1 || cfg.n < 1 || cfg.k < 1 || cfg.k > std::min(cfg.f, cfg.n))
    throw ConfigError("generate_synthetic: need 1 <= k <= min(f,n)");
  if (!(cfg.mutations_per_sample > 0.0))
    throw ConfigError("generate_synthetic: mutations_per_sample must be > 0");

  std::mt19937_64 rng(cfg.seed);
  std::gamma_distribution<double> gamma(0.5, 1.0);
  std::exponential_distribution<double> expo(
      static_cast<double>(cfg.k) / cfg.mutations_per_sample);

  Matrix w(cfg.f, cfg.k);
  for (std::size_t c = 0; c < cfg.k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < cfg.f; ++i) {
      const double g = gamma(rng);
      w(i, c) = g;
      total += g;
    }
    for (std::size_t i = 0; i < cfg.f; ++i) w(i, c) /= total;
  }

  Matrix h(cfg.k, cfg.n);
  for (double& x : h.values()) x = expo(rng);

  Matrix v = matmul(w, h);
  if (cfg.noise == Noise::kPoisson) {
    for (double& x : v.values()) {
      if (x > 0.0) {
        std::poisson_distribution<long> pois(x);
        x = static_cast<double>(pois(rng));
      }
    }
  }

  MutationCatalog cat;
  cat.labels = cfg.f == 96 ? trinucleotide_labels() : std::vector<std::string>();
  if (cat.labels.empty())
    for (std::size_t i = 0; i < cfg.f; ++i) cat.labels.push_back("cat_" + std::to_string(i + 1));
  for (std::size_t j = 0; j < cfg.n; ++j) cat.sample_ids.push_back("sample_" + std::to_string(j + 1));
  cat.counts = std::move(v);
  cat.truth_w = std::move(w);
  cat.truth_h = std::move(h);
  cat.meta["generator"] = "dirichlet-exponential";
  cat.meta["dirichlet_alpha"] = "0.5";
  cat.meta["f"] = std::to_string(cfg.f);
  cat.meta["k"] = std::to_string(cfg.k);
  cat.meta["n"] = std::to_string(cfg.n);
  cat.meta["seed"] = std::to_string(cfg.seed);
  cat.meta["noise"] = cfg.noise == Noise::kPoisson ? "poisson" : "none";
  cat.meta["mutations_per_sample"] = format_double(cfg.mutations_per_sample);
  return cat;
}

}  // namespace dnmf
