#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "psdg/direct.hpp"
#include "psdg/krylov.hpp"
#include "psdg/sparse.hpp"

namespace psdg {

/// Deflation of ker(M) for A* = M + dt A in component-major ordering.
///
/// The basis V = v (x) I with v = (e1 + e4) / sqrt(2) selects the trace
/// direction of each scalar dof; it is applied implicitly. The coarse matrix
/// W = V^T A* V is assembled sparsely and factorised once.
class Deflator {
 public:
  /// Throws std::runtime_error if W is not SPD. Keeps a reference to `system`.
  Deflator(const SparseMatrix& system, std::size_t scalar_dofs);

  std::size_t size() const { return n_; }
  std::size_t coarse_size() const { return ns_; }
  const SparseMatrix& coarse_matrix() const { return coarse_; }
  /// A* V, n x n/4.
  const SparseMatrix& system_times_basis() const { return av_; }

  /// y = V w.
  void prolong(std::span<const double> w, std::span<double> y) const;
  /// w = V^T y.
  void restrict_to_coarse(std::span<const double> y, std::span<double> w) const;
  /// w = W^{-1} g.
  void coarse_solve(std::span<const double> g, std::span<double> w) const;

  /// (I - pi) u with pi = V W^{-1} V^T A*.
  void project(std::span<const double> u, std::span<double> out) const;
  /// (I - pi)^T r.
  void project_transpose(std::span<const double> r, std::span<double> out) const;
  /// A* (I - pi) u; one A* product and one coarse solve.
  void apply_deflated(std::span<const double> u, std::span<double> out) const;
  /// V W^{-1} V^T b.
  void coarse_correction(std::span<const double> b, std::span<double> out) const;

  const SparseMatrix& system() const { return *system_; }

 private:
  const SparseMatrix* system_;
  std::size_t n_ = 0;
  std::size_t ns_ = 0;
  SparseMatrix av_;
  SparseMatrix coarse_;
  SparseCholesky factor_;
};

/// The deflator keeps a reference to `system`, which must outlive it.
Deflator build_deflator(const SparseMatrix& system, std::size_t scalar_dofs);

/// CG on the deflated system A*(I - pi) xh = (I - pi)^T b, followed by the
/// recovery x = (I - pi) xh + V W^{-1} V^T b. The stopping measure is
/// ||b - A* x|| / ||b||; the reported residual is recomputed from the
/// recovered solution.
SolveResult deflated_cg(const Deflator& deflator, std::span<const double> b,
                        const SolverConfig& config);

}  // namespace psdg
