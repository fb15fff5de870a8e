#include "psdg/direct.hpp"

#include <stdexcept>

namespace psdg {

namespace {
constexpr double kPivotTolerance = 1e-15;
}

SparseCholesky::SparseCholesky(const SparseMatrix& matrix)
    : n_(matrix.rows()),
      factor_(std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>()) {
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("Cholesky needs a square matrix");
  factor_->compute(matrix.to_eigen());
  if (factor_->info() != Eigen::Success) {
    throw std::runtime_error("sparse Cholesky factorisation failed (matrix not SPD)");
  }
  // Roundoff lets semidefinite matrices through with tiny pivots.
  if (n_ > 0) {
    const Eigen::VectorXd d = factor_->matrixL().nestedExpression().diagonal();
    const double lo = d.minCoeff(), hi = d.maxCoeff();
    if (!(lo * lo > kPivotTolerance * hi * hi)) {
      throw std::runtime_error("sparse Cholesky factorisation failed (matrix is singular)");
    }
  }
}

void SparseCholesky::solve(std::span<const double> b, std::span<double> x) const {
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(n_));
  Eigen::Map<Eigen::VectorXd> out(x.data(), static_cast<Eigen::Index>(n_));
  out = factor_->solve(rhs);
}

std::vector<double> SparseCholesky::solve(std::span<const double> b) const {
  std::vector<double> x(n_);
  solve(b, x);
  return x;
}

}  // namespace psdg
