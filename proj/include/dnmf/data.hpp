#ifndef DNMF_DATA_HPP_
#define DNMF_DATA_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dnmf/matrix.hpp"

namespace dnmf {

// A mutation count matrix plus optional ground-truth factors. Rows are
// mutation categories, columns are samples.
struct MutationCatalog {
  std::vector<std::string> labels;      // one per row, unique
  std::vector<std::string> sample_ids;  // one per column
  Matrix counts;                        // non-negative, labels.size() x sample_ids.size()
  std::optional<Matrix> truth_w;        // f x k signature profiles
  std::optional<Matrix> truth_h;        // k x n exposures
  std::map<std::string, std::string> meta;
};

// The 96 single-base-substitution classes by trinucleotide context,
// substitution-major: A[C>A]A, A[C>A]C, ...
std::vector<std::string> trinucleotide_labels();

// Labeled CSV: header "category,<id>,<id>,..."; each row a label followed by
// non-negative values. Used for catalogs and for the W/H sidecars.
struct LabeledCsv {
  std::vector<std::string> row_labels;
  std::vector<std::string> column_ids;
  Matrix values;
};
LabeledCsv read_labeled_csv(const std::string& path);
void write_labeled_csv(const std::string& path, const std::vector<std::string>& row_labels,
                       const std::vector<std::string>& column_ids, const Matrix& values);

// Loads and validates a catalog. With require96 set, enforces exactly 96
// category rows. Negative entries and duplicate labels are rejected, naming
// the offending cell.
MutationCatalog load_catalog(const std::string& path, bool require96 = false);

enum class Noise { kNone, kPoisson };

struct GenConfig {
  std::size_t f = 96;
  std::size_t k = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  Noise noise = Noise::kNone;
  // Mean total count per sample; exposures are exponential with mean
  // mutations_per_sample / k, so columns of V = WH sum to this on average.
  double mutations_per_sample = 600.0;
};

// W columns ~ Dirichlet(0.5) over the f categories (each sums to 1),
// H entries exponential, V = WH, optionally Poisson-resampled entrywise.
// Ground truth and generator parameters are stored on the catalog.
MutationCatalog generate_synthetic(const GenConfig& cfg);

}  // namespace dnmf

#endif  // DNMF_DATA_HPP_
