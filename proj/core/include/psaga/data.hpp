#ifndef PSAGA_DATA_HPP
#define PSAGA_DATA_HPP

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace psaga {

using Vector = Eigen::VectorXd;

/// One sparse data row: strictly increasing 0-based feature indices with finite values.
/// The squared Euclidean norm is computed once at construction.
class SparseVec {
 public:
  using index_type = std::uint32_t;

  SparseVec() = default;
  /// Throws argument_error if indices are not strictly increasing, lengths differ,
  /// or any value is non-finite.
  SparseVec(std::vector<index_type> indices, std::vector<double> values);

  std::size_t nnz() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  std::span<const index_type> indices() const noexcept { return indices_; }
  std::span<const double> values() const noexcept { return values_; }
  double squared_norm() const noexcept { return squared_norm_; }
  /// One past the largest stored index (0 for an empty row).
  std::size_t extent() const noexcept { return indices_.empty() ? 0 : indices_.back() + 1; }

  double dot(const Vector &x) const noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < indices_.size(); ++k) s += values_[k] * x[indices_[k]];
    return s;
  }

  /// out += alpha * this
  void axpy(double alpha, Vector &out) const noexcept {
    for (std::size_t k = 0; k < indices_.size(); ++k) out[indices_[k]] += alpha * values_[k];
  }

  Vector to_dense(std::size_t dim) const;

  friend bool operator==(const SparseVec &a, const SparseVec &b) {
    return a.indices_ == b.indices_ && a.values_ == b.values_;
  }

 private:
  std::vector<index_type> indices_;
  std::vector<double> values_;
  double squared_norm_ = 0.0;
};

/// Immutable labelled sparse dataset. Safe to share between concurrent runs.
class Dataset {
 public:
  /// Throws argument_error unless rows.size() == labels.size() >= 1 and every row fits in dim.
  Dataset(std::vector<SparseVec> rows, std::vector<double> labels, std::size_t dim);

  std::size_t n() const noexcept { return rows_.size(); }
  std::size_t d() const noexcept { return dim_; }
  const SparseVec &row(std::size_t i) const { return rows_[i]; }
  double label(std::size_t i) const { return labels_[i]; }
  std::span<const SparseVec> rows() const noexcept { return rows_; }
  std::span<const double> labels() const noexcept { return labels_; }
  double max_squared_norm() const noexcept { return max_squared_norm_; }
  std::size_t total_nnz() const noexcept;

  /// Copy with the feature count raised to dim (to align train/test shapes).
  Dataset with_dimension(std::size_t dim) const;

  friend bool operator==(const Dataset &a, const Dataset &b) {
    return a.dim_ == b.dim_ && a.labels_ == b.labels_ && a.rows_ == b.rows_;
  }

 private:
  std::vector<SparseVec> rows_;
  std::vector<double> labels_;
  std::size_t dim_;
  double max_squared_norm_ = 0.0;
};

struct ParseOptions {
  /// Raw label value -> stored label. Empty means "binary": only +1/-1 accepted.
  std::map<double, double> label_map;
  /// Keep labels verbatim (regression targets). Overrides label_map.
  bool raw_labels = false;
  /// Lower bound on the feature count; d = max(min_dim, largest index seen).
  std::size_t min_dim = 0;
};

/// Parses "1:1,2:-1" into a label map. Throws argument_error on bad syntax.
std::map<double, double> parse_label_map(std::string_view spec);
std::string format_label_map(const std::map<double, double> &map);

/// Parses LIBSVM text (`<label> <idx>:<val> ...`, 1-based indices, '#' comments).
/// Throws parse_error naming the 1-based line on malformed input.
Dataset parse_libsvm(std::istream &in, const ParseOptions &options = {});

/// Reads a LIBSVM file; paths ending in ".gz" are decompressed with zlib.
Dataset read_libsvm(const std::filesystem::path &path, const ParseOptions &options = {});

/// Writes LIBSVM text with shortest round-trip number formatting, so
/// parse_libsvm(write_libsvm(ds)) reproduces ds exactly (given raw labels).
void write_libsvm(std::ostream &out, const Dataset &ds);

/// Row indices of a uniform sample without replacement of ceil(fraction * n) rows,
/// returned in increasing order. fraction == 1 yields 0..n-1.
std::vector<std::size_t> subsample_indices(std::size_t n, double fraction, std::uint64_t seed);

/// Dataset restricted to subsample_indices(ds.n(), fraction, seed); d unchanged.
Dataset subsample(const Dataset &ds, double fraction, std::uint64_t seed);

/// Number of rows subsample() keeps: ceil(fraction * n), robust to representation error
/// in fraction (0.05 * 100 is 5, not 6).
std::size_t subsample_size(std::size_t n, double fraction);

/// Per-feature affine rescaling to [-1, 1] (svm-scale style). Constant features become 0.
/// Off by default in the harness.
Dataset scale_features(const Dataset &ds);

}  // namespace psaga

#endif
