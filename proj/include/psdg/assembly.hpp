#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "psdg/dg_space.hpp"
#include "psdg/problem.hpp"
#include "psdg/sparse.hpp"

namespace psdg {

/// Entries below this fraction of the row maximum are dropped when an
/// assembled operator is finalised.
inline constexpr double kAssemblyDropTolerance = 1e-14;

/// Unscaled deviatoric factor K0 with M = (K0 / mu) (x) M1.
Eigen::Matrix4d deviatoric_factor();

/// Interior-penalty weight of an interior or Neumann face:
/// alpha * max p^2 / h_K over the neighbouring elements.
/// Throws std::logic_error for Dirichlet faces.
double penalty(const PolyMesh& mesh, std::size_t face, double alpha, int degree);

struct MassMatrices {
  SparseMatrix M1;
  Eigen::Matrix4d K;  ///< K0 / mu
  SparseMatrix M;
};

struct StiffnessMatrices {
  SparseMatrix B1;  ///< x-x block
  SparseMatrix B2;  ///< x-y block: test d/dx against trial d/dy
  SparseMatrix B3;  ///< y-y block
  SparseMatrix A;
};

struct StiffnessOptions {
  /// Drop the -<{div tau}, [[sigma]]> term; yields a non-symmetric operator
  /// (only useful for testing).
  bool skip_adjoint_consistency = false;
};

struct SystemMatrices {
  SparseMatrix M1, B1, B2, B3;
  Eigen::Matrix4d K = Eigen::Matrix4d::Zero();
  SparseMatrix M, A;
  double mu = 1.0;
  double alpha = 10.0;
  std::size_t scalar_dofs() const { return M1.rows(); }
};

/// Mass form (mu^-1 dev sigma, dev tau) assembled on the tensor space, plus
/// the scalar mass matrix M1.
MassMatrices assemble_mass(const DGSpace& space, double mu);

/// Symmetric interior-penalty divergence form on interior and Neumann faces,
/// assembled on the tensor space, plus the scalar blocks B1, B2, B3.
StiffnessMatrices assemble_stiffness(const DGSpace& space, double alpha,
                                     const StiffnessOptions& options = {});

SystemMatrices assemble_system(const DGSpace& space, double mu = 1.0, double alpha = 10.0);

/// A* = M + dt A on the union pattern. dt <= 0 throws std::invalid_argument.
SparseMatrix build_system(const SparseMatrix& M, const SparseMatrix& A, double dt);

/// Load vector F(tau) at time t.
std::vector<double> assemble_load(const DGSpace& space, const ProblemData& data, double t,
                                  double alpha);

/// f* = M sigma_prev + dt F(tau) at time t.
std::vector<double> assemble_rhs(const DGSpace& space, const SystemMatrices& system,
                                 const ProblemData& data, double t,
                                 std::span<const double> sigma_prev, double dt);

struct StructureDeviation {
  double mass = 0.0;       ///< max |M - K (x) M1|
  double stiffness = 0.0;  ///< max |A - I2 (x) [B1 B2; B2^T B3]|
};

StructureDeviation kron_structure_check(const SystemMatrices& system);

/// I2 (x) [B1 B2; B2^T B3] in component-major ordering.
SparseMatrix stiffness_from_blocks(const SparseMatrix& B1, const SparseMatrix& B2,
                                   const SparseMatrix& B3);

}  // namespace psdg
