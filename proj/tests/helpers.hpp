#ifndef PSAGA_TEST_HELPERS_HPP
#define PSAGA_TEST_HELPERS_HPP

#include <psaga/data.hpp>
#include <psaga/problem.hpp>

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace psaga::test {

// Rows of a dense matrix as a sparse dataset (zeros dropped).
inline std::shared_ptr<const Dataset> dense_dataset(const Eigen::MatrixXd &A, const std::vector<double> &y) {
  std::vector<SparseVec> rows;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    std::vector<SparseVec::index_type> idx;
    std::vector<double> val;
    for (Eigen::Index k = 0; k < A.cols(); ++k)
      if (A(i, k) != 0.0) {
        idx.push_back(static_cast<SparseVec::index_type>(k));
        val.push_back(A(i, k));
      }
    rows.emplace_back(std::move(idx), std::move(val));
  }
  return std::make_shared<const Dataset>(std::move(rows), y, static_cast<std::size_t>(A.cols()));
}

inline Problem dense_problem(const Eigen::MatrixXd &A, const std::vector<double> &y, LossKind loss, double mu) {
  return derive_constants(dense_dataset(A, y), loss, mu);
}

inline double rel_diff(const Vector &a, const Vector &b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace psaga::test

#endif
