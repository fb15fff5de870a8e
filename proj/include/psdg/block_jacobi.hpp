#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "psdg/sparse.hpp"

namespace psdg {

/// Component-major dof layout: index = c * scalar_dofs + e * local_dim + i.
struct DofLayout {
  std::size_t num_elements = 0;
  std::size_t local_dim = 0;
  std::size_t components = 4;

  std::size_t scalar_dofs() const { return num_elements * local_dim; }
  std::size_t total_dofs() const { return components * scalar_dofs(); }
};

enum class BlockLayout {
  /// One block per (component, element): the dofs of a single component.
  ComponentWise,
  /// One block per element gathering all components of that element.
  Collective,
};

/// Block-Jacobi preconditioner with densely Cholesky-factorised diagonal blocks.
class BlockJacobi {
 public:
  /// Throws std::runtime_error naming the element if a block is not SPD.
  BlockJacobi(const SparseMatrix& matrix, const DofLayout& layout, BlockLayout block_layout);

  BlockLayout layout() const { return layout_; }
  std::size_t block_size() const { return block_size_; }
  std::size_t num_blocks() const { return blocks_.size(); }
  /// Global dof indices of block b, in block-local order.
  std::span<const std::size_t> block_indices(std::size_t b) const;
  /// Concatenated block index lists: the dof permutation new -> old. For the
  /// collective layout this is the element-major reordering (c, e, i) -> (e, c, i).
  const std::vector<std::size_t>& permutation() const { return permutation_; }
  const Eigen::MatrixXd& block(std::size_t b) const { return blocks_[b]; }

  /// z = blockdiag(A)^{-1} r.
  void apply(std::span<const double> r, std::span<double> z) const;
  /// z = blockdiag(A) r.
  void multiply(std::span<const double> r, std::span<double> z) const;

 private:
  BlockLayout layout_;
  std::size_t block_size_ = 0;
  std::vector<std::size_t> permutation_;
  std::vector<Eigen::MatrixXd> blocks_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
};

}  // namespace psdg
