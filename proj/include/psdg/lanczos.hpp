#pragma once

#include <cstddef>
#include <cstdint>

#include "psdg/block_jacobi.hpp"
#include "psdg/krylov.hpp"
#include "psdg/sparse.hpp"

namespace psdg {

struct LanczosOptions {
  /// Relative Ritz residual required of an extreme Ritz value.
  double tol = 1e-6;
  std::size_t max_iterations = 400;
  std::uint64_t seed = 20240607;
};

struct RitzExtremes {
  double largest = 0.0;
  double smallest = 0.0;
  bool largest_converged = false;
  bool smallest_converged = false;
  std::size_t iterations = 0;
};

enum class LanczosTarget { Largest, Both };

/// Symmetric Lanczos with full reorthogonalisation for the pencil
/// stiffness x = lambda mass x, in the mass inner product. Only the inverse of
/// the (SPD) mass is needed; an empty `inverse_mass` means the identity.
RitzExtremes lanczos_extremes(const LinearOperator& stiffness,
                              const LinearOperator& inverse_mass, std::size_t n,
                              LanczosTarget target, const LanczosOptions& options = {});

struct ConditionEstimate {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double condition = 0.0;
  /// False when an extreme Ritz value missed the tolerance (flagged estimate).
  bool converged = false;
  bool exact = false;
  std::size_t iterations = 0;
};

/// Both extremes from one forward Lanczos run on P^{-1} A (P = I if
/// `preconditioner` is empty). Suited to moderately conditioned operators.
ConditionEstimate estimate_condition_number(const LinearOperator& op,
                                            const LinearOperator& preconditioner,
                                            std::size_t n, const LanczosOptions& options = {});

enum class ConditionMethod {
  Auto,     ///< dense below `dense_limit`, Lanczos otherwise
  Lanczos,  ///< forward run for lambda_max, inverse run for lambda_min
  Dense,
};

/// Condition number of A or of blockdiag(A)^{-1} A. The Lanczos path gets
/// lambda_min from a run on the inverse pencil, using a sparse Cholesky
/// factorisation of A, so ill-conditioned systems converge in few steps.
ConditionEstimate estimate_condition_number(const SparseMatrix& a,
                                            const BlockJacobi* preconditioner,
                                            const LanczosOptions& options = {},
                                            ConditionMethod method = ConditionMethod::Auto,
                                            std::size_t dense_limit = 2000);

/// Exact extreme (generalised) eigenvalues by dense eigensolve.
ConditionEstimate dense_condition_number(const SparseMatrix& a,
                                         const BlockJacobi* preconditioner = nullptr);

}  // namespace psdg
