#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "psdg/assembly.hpp"
#include "psdg/block_jacobi.hpp"
#include "psdg/deflation.hpp"
#include "psdg/direct.hpp"
#include "psdg/krylov.hpp"
#include "psdg/problem.hpp"

namespace psdg {

/// Implicit Euler (theta = 1) time grid.
struct TimeConfig {
  double dt = 0.0;
  double final_time = 0.0;
  std::size_t steps = 0;

  /// steps = round(T / dt); throws std::invalid_argument if dt <= 0, T < 0, or
  /// steps * dt misses T by more than 1e-12 relative.
  static TimeConfig make(double dt, double final_time);
  double time(std::size_t step) const { return static_cast<double>(step) * dt; }
};

enum class SolverKind { Cg, DeflatedCg, PcgBlockJacobi, PcgCollectiveBlockJacobi, Direct };

/// "cg", "dcg", "pcg-bj", "pcg-cbj", "direct".
SolverKind parse_solver(const std::string& name);
std::string solver_name(SolverKind kind);

/// A fixed system A* together with whatever its solver needs (preconditioner,
/// deflator or factorisation), built once and reused for every right-hand side.
class LinearSolver {
 public:
  LinearSolver(SparseMatrix system, const DofLayout& layout, SolverKind kind,
               const SolverConfig& config);
  LinearSolver(const LinearSolver&) = delete;
  LinearSolver& operator=(const LinearSolver&) = delete;

  SolveResult solve(std::span<const double> b) const;
  SolverKind kind() const { return kind_; }
  const SparseMatrix& system() const { return *system_; }
  const BlockJacobi* preconditioner() const { return preconditioner_.get(); }

 private:
  // Heap-held so the deflator's reference stays valid.
  std::unique_ptr<SparseMatrix> system_;
  SolverKind kind_;
  SolverConfig config_;
  std::unique_ptr<BlockJacobi> preconditioner_;
  std::unique_ptr<Deflator> deflator_;
  std::unique_ptr<SparseCholesky> factor_;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(std::size_t step, const SolverReport& report);
  std::size_t step() const { return step_; }
  const SolverReport& report() const { return report_; }

 private:
  std::size_t step_;
  SolverReport report_;
};

struct StepRecord {
  std::size_t step = 0;
  double time = 0.0;
  SolverReport report;
};

struct RunResult {
  std::vector<double> sigma;
  std::vector<StepRecord> steps;
};

/// N_T implicit Euler steps A* s^{n+1} = M s^n + dt F(t_{n+1}) from the L2
/// projection of the initial condition. Throws NonConvergence on the first
/// step whose solve does not converge.
RunResult implicit_euler_run(const DGSpace& space, const SystemMatrices& system,
                             const ProblemData& data, const TimeConfig& time, SolverKind solver,
                             const SolverConfig& config);

/// step,time,iterations,residual
std::string step_log_csv(const RunResult& run);

/// DG energy norm mu^-1 ||dev t||^2 + ||div_h t||^2 + sum gamma ||[[t]]||^2
/// over interior and Neumann faces, of a discrete field.
double energy_norm(const DGSpace& space, std::span<const double> dofs, double alpha,
                   double mu = 1.0);

/// Energy norm of sigma_h - sigma(t), with quadrature two degrees above
/// assembly.
double energy_error(const DGSpace& space, std::span<const double> dofs, const ExactField& exact,
                    double t, double alpha, double mu = 1.0);

}  // namespace psdg
