#include "psdg/krylov.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace psdg {

LinearOperator as_operator(const SparseMatrix& m) {
  return [&m](std::span<const double> x, std::span<double> y) { m.multiply(x, y); };
}

void SolverConfig::validate() const {
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("solver tolerance must lie in (0, 1)");
  if (maxit < 1) throw std::invalid_argument("solver iteration cap must be at least 1");
}

namespace {

// Shared CG recursion; an empty preconditioner means the identity, which then
// reproduces plain CG update by update.
SolveResult conjugate_gradient(const LinearOperator& op, std::span<const double> b,
                               const LinearOperator* preconditioner,
                               const SolverConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = b.size();
  SolveResult out;
  out.x.assign(n, 0.0);
  auto& rep = out.report;

  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n), p(n), q(n);
  auto precondition = [&] {
    if (preconditioner) {
      (*preconditioner)(r, z);
    } else {
      z = r;
    }
  };
  precondition();
  const double reference = norm2(z);
  if (reference == 0.0) {
    rep.converged = true;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  }
  if (config.record_history) rep.history.push_back(1.0);
  double rz = dot(r, z);
  p = z;
  double residual = 1.0;
  for (std::size_t k = 1; k <= config.maxit; ++k) {
    op(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) break;  // breakdown: operator not positive on p
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      out.x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    precondition();
    residual = norm2(z) / reference;
    rep.iterations = k;
    if (config.record_history) rep.history.push_back(residual);
    if (residual <= config.tol) {
      rep.converged = true;
      break;
    }
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  rep.relative_residual = residual;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

SolveResult cg(const LinearOperator& op, std::span<const double> b, const SolverConfig& config) {
  return conjugate_gradient(op, b, nullptr, config);
}

SolveResult pcg(const LinearOperator& op, std::span<const double> b,
                const LinearOperator& preconditioner, const SolverConfig& config) {
  return conjugate_gradient(op, b, &preconditioner, config);
}

std::string history_csv(const SolverReport& report) {
  std::ostringstream out;
  out << "iteration,relative_residual\n" << std::setprecision(17);
  for (std::size_t k = 0; k < report.history.size(); ++k) {
    out << k << ',' << report.history[k] << '\n';
  }
  return out.str();
}

}  // namespace psdg
