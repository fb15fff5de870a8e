#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstddef>
#include <span>
#include <vector>

namespace psdg {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row matrix with sorted column indices per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> col_indices, std::vector<double> values);

  /// Sums duplicates in (row, col) order, so the result does not depend on
  /// the order of `triplets`. Entries with |a_ij| <= drop_relative * max_j |a_ij|
  /// are removed (0 keeps everything except exact zeros).
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> triplets,
                                    double drop_relative = 0.0);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const std::size_t> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// y = A x.
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;
  /// Stored value or 0.
  double coeff(std::size_t row, std::size_t col) const;
  /// Pointer to a stored entry, nullptr if not in the pattern.
  double* find(std::size_t row, std::size_t col);

  double max_abs() const;
  SparseMatrix transpose() const;
  Eigen::MatrixXd to_dense() const;
  Eigen::SparseMatrix<double> to_eigen() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

/// sa * a + sb * b on the union of both patterns.
SparseMatrix add(const SparseMatrix& a, double sa, const SparseMatrix& b, double sb);
/// Kronecker product factor (x) block for a small dense factor.
SparseMatrix kronecker(const Eigen::MatrixXd& factor, const SparseMatrix& block);
/// Block matrix from a grid of optional blocks of equal size.
SparseMatrix block_matrix(const std::vector<std::vector<const SparseMatrix*>>& blocks);
/// max |a_ij - b_ij| over the union of the patterns.
double max_abs_difference(const SparseMatrix& a, const SparseMatrix& b);
/// max |a_ij - a_ji|.
double symmetry_defect(const SparseMatrix& a);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace psdg
