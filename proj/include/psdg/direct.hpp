#pragma once

#include <Eigen/SparseCholesky>
#include <memory>
#include <span>
#include <vector>

#include "psdg/sparse.hpp"

namespace psdg {

/// Sparse symmetric positive definite factorisation (simplicial LL^T with
/// approximate minimum degree ordering). Factorise once, solve many times.
class SparseCholesky {
 public:
  /// Throws std::runtime_error if the matrix is not numerically SPD.
  explicit SparseCholesky(const SparseMatrix& matrix);

  std::size_t size() const { return n_; }
  void solve(std::span<const double> b, std::span<double> x) const;
  std::vector<double> solve(std::span<const double> b) const;

 private:
  std::size_t n_ = 0;
  std::shared_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> factor_;
};

}  // namespace psdg
