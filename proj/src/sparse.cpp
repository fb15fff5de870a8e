#include "psdg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace psdg {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols,
                           std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (row_offsets_.size() != rows_ + 1 || col_indices_.size() != values_.size() ||
      row_offsets_.back() != values_.size()) {
    throw std::invalid_argument("inconsistent CSR arrays");
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      if (col_indices_[k] >= cols_ ||
          (k > row_offsets_[r] && col_indices_[k] <= col_indices_[k - 1])) {
        throw std::invalid_argument("CSR column indices must be sorted and in range");
      }
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets,
                                         double drop_relative) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) throw std::out_of_range("triplet out of range");
  }
  // Stable sort keeps duplicate summation order fixed by the caller.
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_offsets_.assign(rows + 1, 0);
  std::vector<std::size_t> cols_tmp;
  std::vector<double> vals_tmp;
  std::size_t k = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t row_start = cols_tmp.size();
    while (k < triplets.size() && triplets[k].row == r) {
      const std::size_t c = triplets[k].col;
      double sum = 0.0;
      while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) {
        sum += triplets[k].value;
        ++k;
      }
      cols_tmp.push_back(c);
      vals_tmp.push_back(sum);
    }
    double row_max = 0.0;
    for (std::size_t j = row_start; j < vals_tmp.size(); ++j) {
      row_max = std::max(row_max, std::abs(vals_tmp[j]));
    }
    const double threshold = drop_relative * row_max;
    for (std::size_t j = row_start; j < vals_tmp.size(); ++j) {
      if (vals_tmp[j] != 0.0 && std::abs(vals_tmp[j]) > threshold) {
        m.col_indices_.push_back(cols_tmp[j]);
        m.values_.push_back(vals_tmp[j]);
      }
    }
    m.row_offsets_[r + 1] = m.values_.size();
  }
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> offsets(n + 1);
  std::vector<std::size_t> cols(n);
  for (std::size_t i = 0; i <= n; ++i) offsets[i] = i;
  for (std::size_t i = 0; i < n; ++i) cols[i] = i;
  return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_) {
    throw std::invalid_argument("matrix-vector size mismatch");
  }
  const auto nrows = static_cast<std::ptrdiff_t>(rows_);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < nrows; ++r) {
    double s = 0.0;
    const auto ru = static_cast<std::size_t>(r);
    for (std::size_t k = row_offsets_[ru]; k < row_offsets_[ru + 1]; ++k) {
      s += values_[k] * x[col_indices_[k]];
    }
    y[ru] = s;
  }
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

double SparseMatrix::coeff(std::size_t row, std::size_t col) const {
  const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row]);
  const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row + 1]);
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

double* SparseMatrix::find(std::size_t row, std::size_t col) {
  const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row]);
  const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row + 1]);
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return nullptr;
  return &values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      t.push_back({col_indices_[k], r, values_[k]});
    }
  }
  return from_triplets(cols_, rows_, std::move(t));
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_),
                                            static_cast<Eigen::Index>(cols_));
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col_indices_[k])) = values_[k];
    }
  }
  return d;
}

Eigen::SparseMatrix<double> SparseMatrix::to_eigen() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      t.emplace_back(static_cast<int>(r), static_cast<int>(col_indices_[k]), values_[k]);
    }
  }
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(rows_),
                                static_cast<Eigen::Index>(cols_));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix add(const SparseMatrix& a, double sa, const SparseMatrix& b, double sb) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("matrix sum size mismatch");
  }
  std::vector<std::size_t> offsets(a.rows() + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  cols.reserve(a.nnz() + b.nnz());
  vals.reserve(a.nnz() + b.nnz());
  const auto ao = a.row_offsets();
  const auto bo = b.row_offsets();
  const auto ac = a.col_indices();
  const auto bc = b.col_indices();
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    std::size_t i = ao[r];
    std::size_t j = bo[r];
    while (i < ao[r + 1] || j < bo[r + 1]) {
      if (j >= bo[r + 1] || (i < ao[r + 1] && ac[i] < bc[j])) {
        cols.push_back(ac[i]);
        vals.push_back(sa * av[i]);
        ++i;
      } else if (i >= ao[r + 1] || bc[j] < ac[i]) {
        cols.push_back(bc[j]);
        vals.push_back(sb * bv[j]);
        ++j;
      } else {
        cols.push_back(ac[i]);
        vals.push_back(sa * av[i] + sb * bv[j]);
        ++i;
        ++j;
      }
    }
    offsets[r + 1] = vals.size();
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(offsets), std::move(cols),
                      std::move(vals));
}

SparseMatrix kronecker(const Eigen::MatrixXd& factor, const SparseMatrix& block) {
  std::vector<Triplet> t;
  const std::size_t br = block.rows();
  const std::size_t bc = block.cols();
  const auto offsets = block.row_offsets();
  for (Eigen::Index i = 0; i < factor.rows(); ++i) {
    for (Eigen::Index j = 0; j < factor.cols(); ++j) {
      const double f = factor(i, j);
      if (f == 0.0) continue;
      for (std::size_t r = 0; r < br; ++r) {
        for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) {
          t.push_back({static_cast<std::size_t>(i) * br + r,
                       static_cast<std::size_t>(j) * bc + block.col_indices()[k],
                       f * block.values()[k]});
        }
      }
    }
  }
  return SparseMatrix::from_triplets(static_cast<std::size_t>(factor.rows()) * br,
                                     static_cast<std::size_t>(factor.cols()) * bc,
                                     std::move(t));
}

SparseMatrix block_matrix(const std::vector<std::vector<const SparseMatrix*>>& blocks) {
  std::size_t br = 0;
  std::size_t bc = 0;
  for (const auto& row : blocks) {
    for (const auto* b : row) {
      if (b) {
        br = b->rows();
        bc = b->cols();
      }
    }
  }
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    for (std::size_t j = 0; j < blocks[i].size(); ++j) {
      const SparseMatrix* b = blocks[i][j];
      if (!b) continue;
      if (b->rows() != br || b->cols() != bc) {
        throw std::invalid_argument("block sizes differ");
      }
      for (std::size_t r = 0; r < br; ++r) {
        for (std::size_t k = b->row_offsets()[r]; k < b->row_offsets()[r + 1]; ++k) {
          t.push_back({i * br + r, j * bc + b->col_indices()[k], b->values()[k]});
        }
      }
    }
  }
  const std::size_t ncols = blocks.empty() ? 0 : blocks.front().size() * bc;
  return SparseMatrix::from_triplets(blocks.size() * br, ncols, std::move(t));
}

double max_abs_difference(const SparseMatrix& a, const SparseMatrix& b) {
  return add(a, 1.0, b, -1.0).max_abs();
}

double symmetry_defect(const SparseMatrix& a) {
  return max_abs_difference(a, a.transpose());
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace psdg
