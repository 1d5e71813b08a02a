#include "psaga/data.hpp"

#include "psaga/error.hpp"
#include "psaga/rng.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace psaga {

namespace {

bool parse_double(std::string_view tok, double &out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

bool parse_index(std::string_view tok, std::uint64_t &out) {
  if (tok.empty()) return false;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string read_gzip(const std::filesystem::path &path) {
  gzFile file = gzopen(path.string().c_str(), "rb");
  if (file == nullptr) throw std::runtime_error("cannot open " + path.string());
  std::string out;
  char buf[1 << 16];
  int got = 0;
  while ((got = gzread(file, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(got));
  const bool failed = got < 0;
  gzclose(file);
  if (failed) throw std::runtime_error("gzip read failure in " + path.string());
  return out;
}

}  // namespace

SparseVec::SparseVec(std::vector<index_type> indices, std::vector<double> values)
    : indices_(std::move(indices)), values_(std::move(values)) {
  if (indices_.size() != values_.size())
    throw argument_error("SparseVec: index and value counts differ");
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (k > 0 && indices_[k] <= indices_[k - 1])
      throw argument_error("SparseVec: indices must be strictly increasing");
    if (!std::isfinite(values_[k])) throw argument_error("SparseVec: non-finite value");
    squared_norm_ += values_[k] * values_[k];
  }
}

Vector SparseVec::to_dense(std::size_t dim) const {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(dim));
  axpy(1.0, out);
  return out;
}

Dataset::Dataset(std::vector<SparseVec> rows, std::vector<double> labels, std::size_t dim)
    : rows_(std::move(rows)), labels_(std::move(labels)), dim_(dim) {
  if (rows_.empty()) throw argument_error("Dataset: at least one example is required");
  if (rows_.size() != labels_.size()) throw argument_error("Dataset: row and label counts differ");
  for (const auto &r : rows_) {
    if (r.extent() > dim_) throw argument_error("Dataset: row index exceeds feature count");
    max_squared_norm_ = std::max(max_squared_norm_, r.squared_norm());
  }
  for (double y : labels_)
    if (!std::isfinite(y)) throw argument_error("Dataset: non-finite label");
}

std::size_t Dataset::total_nnz() const noexcept {
  std::size_t s = 0;
  for (const auto &r : rows_) s += r.nnz();
  return s;
}

Dataset Dataset::with_dimension(std::size_t dim) const {
  if (dim < dim_) throw argument_error("Dataset: feature count may only be raised");
  return Dataset(rows_, labels_, dim);
}

std::map<double, double> parse_label_map(std::string_view spec) {
  std::map<double, double> out;
  while (!spec.empty()) {
    const auto comma = spec.find(',');
    const std::string_view item = spec.substr(0, comma);
    const auto colon = item.find(':');
    double from = 0.0;
    double to = 0.0;
    if (colon == std::string_view::npos || !parse_double(item.substr(0, colon), from) ||
        !parse_double(item.substr(colon + 1), to))
      throw argument_error("bad label map entry '" + std::string(item) + "'");
    out[from] = to;
    if (comma == std::string_view::npos) break;
    spec.remove_prefix(comma + 1);
  }
  return out;
}

std::string format_label_map(const std::map<double, double> &map) {
  std::string out;
  for (const auto &[from, to] : map) {
    if (!out.empty()) out += ',';
    out += format_double(from) + ":" + format_double(to);
  }
  return out;
}

Dataset parse_libsvm(std::istream &in, const ParseOptions &options) {
  std::vector<SparseVec> rows;
  std::vector<double> labels;
  std::size_t dim = options.min_dim;
  std::string line;
  std::size_t lineno = 0;
  std::vector<SparseVec::index_type> idx;
  std::vector<double> val;

  while (std::getline(in, line)) {
    ++lineno;
    std::string_view text(line);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);

    idx.clear();
    val.clear();
    bool have_label = false;
    double label = 0.0;
    std::size_t pos = 0;
    while (true) {
      pos = text.find_first_not_of(" \t\r", pos);
      if (pos == std::string_view::npos) break;
      const std::size_t end = std::min(text.find_first_of(" \t\r", pos), text.size());
      const std::string_view tok = text.substr(pos, end - pos);
      pos = end;

      if (!have_label) {
        if (!parse_double(tok, label) || !std::isfinite(label))
          throw parse_error(lineno, "bad label '" + std::string(tok) + "'");
        have_label = true;
        continue;
      }
      const auto colon = tok.find(':');
      std::uint64_t one_based = 0;
      double v = 0.0;
      if (colon == std::string_view::npos || !parse_index(tok.substr(0, colon), one_based))
        throw parse_error(lineno, "bad feature token '" + std::string(tok) + "'");
      if (!parse_double(tok.substr(colon + 1), v) || !std::isfinite(v))
        throw parse_error(lineno, "non-numeric value in '" + std::string(tok) + "'");
      if (one_based == 0) throw parse_error(lineno, "feature indices are 1-based");
      if (one_based > 0xffffffffULL) throw parse_error(lineno, "feature index too large");
      const auto zero_based = static_cast<SparseVec::index_type>(one_based - 1);
      if (!idx.empty() && zero_based <= idx.back())
        throw parse_error(lineno, "feature indices must be strictly increasing");
      idx.push_back(zero_based);
      val.push_back(v);
    }
    if (!have_label) continue;

    if (!options.raw_labels) {
      if (options.label_map.empty()) {
        if (label != 1.0 && label != -1.0)
          throw parse_error(lineno, "label must be +1 or -1 (supply a label map)");
      } else {
        const auto it = options.label_map.find(label);
        if (it == options.label_map.end())
          throw parse_error(lineno, "label not in label map");
        label = it->second;
      }
    }
    if (!idx.empty()) dim = std::max<std::size_t>(dim, idx.back() + 1);
    rows.emplace_back(idx, val);
    labels.push_back(label);
  }
  if (rows.empty()) throw parse_error(lineno, "no examples");
  return Dataset(std::move(rows), std::move(labels), dim);
}

Dataset read_libsvm(const std::filesystem::path &path, const ParseOptions &options) {
  if (path.extension() == ".gz") {
    std::istringstream in(read_gzip(path));
    return parse_libsvm(in, options);
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_libsvm(in, options);
}

void write_libsvm(std::ostream &out, const Dataset &ds) {
  for (std::size_t i = 0; i < ds.n(); ++i) {
    out << format_double(ds.label(i));
    const auto &r = ds.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k)
      out << ' ' << (r.indices()[k] + 1) << ':' << format_double(r.values()[k]);
    out << '\n';
  }
}

std::size_t subsample_size(std::size_t n, double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw argument_error("subsample fraction must lie in (0, 1]");
  const double exact = fraction * static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
  k = std::min(std::max<std::size_t>(k, 1), n);
  return k;
}

std::vector<std::size_t> subsample_indices(std::size_t n, double fraction, std::uint64_t seed) {
  const std::size_t k = subsample_size(n, fraction);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  if (k == n) return perm;
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
    std::swap(perm[i], perm[j]);
  }
  perm.resize(k);
  std::sort(perm.begin(), perm.end());
  return perm;
}

Dataset subsample(const Dataset &ds, double fraction, std::uint64_t seed) {
  const auto keep = subsample_indices(ds.n(), fraction, seed);
  if (keep.size() == ds.n()) return ds;
  std::vector<SparseVec> rows;
  std::vector<double> labels;
  rows.reserve(keep.size());
  labels.reserve(keep.size());
  for (std::size_t i : keep) {
    rows.push_back(ds.row(i));
    labels.push_back(ds.label(i));
  }
  return Dataset(std::move(rows), std::move(labels), ds.d());
}

Dataset scale_features(const Dataset &ds) {
  const std::size_t d = ds.d();
  std::vector<double> lo(d, 0.0);
  std::vector<double> hi(d, 0.0);
  std::vector<std::size_t> count(d, 0);
  for (const auto &r : ds.rows()) {
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      const auto j = r.indices()[k];
      lo[j] = std::min(lo[j], r.values()[k]);
      hi[j] = std::max(hi[j], r.values()[k]);
      ++count[j];
    }
  }
  // Implicit zeros take part in the range unless every row stores the feature.
  for (std::size_t j = 0; j < d; ++j) {
    if (count[j] == ds.n()) {
      lo[j] = std::numeric_limits<double>::infinity();
      hi[j] = -std::numeric_limits<double>::infinity();
    }
  }
  for (const auto &r : ds.rows())
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      const auto j = r.indices()[k];
      if (count[j] == ds.n()) {
        lo[j] = std::min(lo[j], r.values()[k]);
        hi[j] = std::max(hi[j], r.values()[k]);
      }
    }

  auto map = [&](std::size_t j, double v) {
    return hi[j] > lo[j] ? 2.0 * (v - lo[j]) / (hi[j] - lo[j]) - 1.0 : 0.0;
  };

  std::vector<SparseVec> rows;
  rows.reserve(ds.n());
  std::vector<SparseVec::index_type> idx;
  std::vector<double> val;
  for (const auto &r : ds.rows()) {
    idx.clear();
    val.clear();
    std::size_t k = 0;
    for (std::size_t j = 0; j < d; ++j) {
      double raw = 0.0;
      if (k < r.nnz() && r.indices()[k] == j) raw = r.values()[k++];
      const double v = map(j, raw);
      if (v != 0.0) {
        idx.push_back(static_cast<SparseVec::index_type>(j));
        val.push_back(v);
      }
    }
    rows.emplace_back(idx, val);
  }
  return Dataset(std::move(rows), std::vector<double>(ds.labels().begin(), ds.labels().end()), d);
}

}  // namespace psaga
