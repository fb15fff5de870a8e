#include "psdg/block_jacobi.hpp"

#include <stdexcept>
#include <string>

namespace psdg {

namespace {
using Eigen::Index;
}

BlockJacobi::BlockJacobi(const SparseMatrix& matrix, const DofLayout& layout,
                         BlockLayout block_layout)
    : layout_(block_layout) {
  const std::size_t n = layout.total_dofs();
  if (matrix.rows() != n || matrix.cols() != n) {
    throw std::invalid_argument("block Jacobi: matrix size does not match the dof layout");
  }
  const std::size_t ne = layout.num_elements;
  const std::size_t ld = layout.local_dim;
  const std::size_t ns = layout.scalar_dofs();
  const std::size_t nb = block_layout == BlockLayout::Collective ? ne : layout.components * ne;
  block_size_ = block_layout == BlockLayout::Collective ? layout.components * ld : ld;

  permutation_.reserve(n);
  if (block_layout == BlockLayout::Collective) {
    for (std::size_t e = 0; e < ne; ++e) {
      for (std::size_t c = 0; c < layout.components; ++c) {
        for (std::size_t i = 0; i < ld; ++i) permutation_.push_back(c * ns + e * ld + i);
      }
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) permutation_.push_back(k);
  }

  // Position of every dof inside its block.
  std::vector<std::size_t> block_of(n), local_of(n);
  for (std::size_t k = 0; k < n; ++k) {
    block_of[permutation_[k]] = k / block_size_;
    local_of[permutation_[k]] = k % block_size_;
  }
  blocks_.assign(nb, Eigen::MatrixXd::Zero(static_cast<Index>(block_size_),
                                           static_cast<Index>(block_size_)));
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t b = block_of[r];
    for (std::size_t k = matrix.row_offsets()[r]; k < matrix.row_offsets()[r + 1]; ++k) {
      const std::size_t c = matrix.col_indices()[k];
      if (block_of[c] == b) {
        blocks_[b](static_cast<Index>(local_of[r]), static_cast<Index>(local_of[c])) =
            matrix.values()[k];
      }
    }
  }
  factors_.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    factors_[b].compute(blocks_[b]);
    if (factors_[b].info() != Eigen::Success) {
      const std::size_t element = block_layout == BlockLayout::Collective ? b : b % ne;
      std::string what = "block Jacobi: diagonal block of element " + std::to_string(element);
      if (block_layout == BlockLayout::ComponentWise) {
        what += " (component " + std::to_string(b / ne) + ")";
      }
      throw std::runtime_error(what + " is not positive definite");
    }
  }
}

std::span<const std::size_t> BlockJacobi::block_indices(std::size_t b) const {
  return std::span<const std::size_t>(permutation_).subspan(b * block_size_, block_size_);
}

void BlockJacobi::apply(std::span<const double> r, std::span<double> z) const {
  const auto nb = static_cast<std::ptrdiff_t>(blocks_.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ib = 0; ib < nb; ++ib) {
    const auto b = static_cast<std::size_t>(ib);
    const auto idx = block_indices(b);
    Eigen::VectorXd local(static_cast<Index>(block_size_));
    for (std::size_t i = 0; i < block_size_; ++i) local(static_cast<Index>(i)) = r[idx[i]];
    factors_[b].solveInPlace(local);
    for (std::size_t i = 0; i < block_size_; ++i) z[idx[i]] = local(static_cast<Index>(i));
  }
}

void BlockJacobi::multiply(std::span<const double> r, std::span<double> z) const {
  const auto nb = static_cast<std::ptrdiff_t>(blocks_.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ib = 0; ib < nb; ++ib) {
    const auto b = static_cast<std::size_t>(ib);
    const auto idx = block_indices(b);
    Eigen::VectorXd local(static_cast<Index>(block_size_));
    for (std::size_t i = 0; i < block_size_; ++i) local(static_cast<Index>(i)) = r[idx[i]];
    const Eigen::VectorXd out = blocks_[b] * local;
    for (std::size_t i = 0; i < block_size_; ++i) z[idx[i]] = out(static_cast<Index>(i));
  }
}

}  // namespace psdg
