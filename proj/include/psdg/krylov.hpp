#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "psdg/sparse.hpp"

namespace psdg {

/// y = Op(x); x and y have the operator dimension and do not alias.
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

LinearOperator as_operator(const SparseMatrix& m);

struct SolverConfig {
  double tol = 1e-8;
  std::size_t maxit = 100000;
  bool record_history = false;

  void validate() const;
};

struct SolverReport {
  std::size_t iterations = 0;
  /// Final relative residual in the solver's stopping measure.
  double relative_residual = 0.0;
  bool converged = false;
  std::vector<double> history;
  double wall_seconds = 0.0;
};

struct SolveResult {
  std::vector<double> x;
  SolverReport report;
};

/// Conjugate gradients from x0 = 0; stops on ||r_k|| / ||b|| <= tol.
SolveResult cg(const LinearOperator& op, std::span<const double> b, const SolverConfig& config);

/// Preconditioned CG from x0 = 0; stops on ||P r_k|| / ||P b|| <= tol where P
/// applies the (SPD) preconditioner inverse.
SolveResult pcg(const LinearOperator& op, std::span<const double> b,
                const LinearOperator& preconditioner, const SolverConfig& config);

/// Residual history as CSV (iteration,relative_residual).
std::string history_csv(const SolverReport& report);

}  // namespace psdg
