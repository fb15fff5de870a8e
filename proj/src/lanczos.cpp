#include "psdg/lanczos.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <stdexcept>

#include "psdg/direct.hpp"

namespace psdg {

namespace {

using Eigen::Index;

}  // namespace

RitzExtremes lanczos_extremes(const LinearOperator& stiffness,
                              const LinearOperator& inverse_mass, std::size_t n,
                              LanczosTarget target, const LanczosOptions& options) {
  if (n == 0) throw std::invalid_argument("Lanczos on an empty operator");
  const std::size_t kmax = std::min(options.max_iterations, n);
  // q: mass-orthonormal Lanczos vectors; p = mass * q.
  std::vector<std::vector<double>> q_vecs, p_vecs;
  std::vector<double> alphas, betas;

  std::mt19937_64 rng(options.seed);
  std::vector<double> u(n), z(n);
  for (auto& v : u) v = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
  auto apply_inverse_mass = [&](std::span<const double> in, std::span<double> out) {
    if (inverse_mass) {
      inverse_mass(in, out);
    } else {
      std::copy(in.begin(), in.end(), out.begin());
    }
  };
  apply_inverse_mass(u, z);
  double beta = std::sqrt(dot(u, z));

  RitzExtremes out;
  bool invariant = false;
  for (std::size_t k = 0; k < kmax; ++k) {
    std::vector<double> q(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      q[i] = z[i] / beta;
      p[i] = u[i] / beta;
    }
    stiffness(q, u);
    const double alpha = dot(q, u);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] -= alpha * p[i];
      if (k > 0) u[i] -= betas.back() * p_vecs.back()[i];
    }
    q_vecs.push_back(std::move(q));
    p_vecs.push_back(std::move(p));
    alphas.push_back(alpha);
    // Full reorthogonalisation, two passes.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < q_vecs.size(); ++j) {
        const double c = dot(q_vecs[j], u);
        for (std::size_t i = 0; i < n; ++i) u[i] -= c * p_vecs[j][i];
      }
    }
    apply_inverse_mass(u, z);
    const double uz = dot(u, z);
    beta = uz > 0.0 ? std::sqrt(uz) : 0.0;
    out.iterations = k + 1;

    const auto m = static_cast<Index>(alphas.size());
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alphas.data(), m);
    Eigen::VectorXd sub = m > 1 ? Eigen::Map<const Eigen::VectorXd>(betas.data(), m - 1)
                                : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const auto& theta = eig.eigenvalues();
    const auto& y = eig.eigenvectors();
    const double scale = std::max(std::abs(theta(0)), std::abs(theta(m - 1)));
    invariant = beta <= 1e-13 * scale || k + 1 == n;
    out.largest = theta(m - 1);
    out.smallest = theta(0);
    out.largest_converged =
        invariant || std::abs(beta * y(m - 1, m - 1)) <= options.tol * std::abs(theta(m - 1));
    out.smallest_converged =
        invariant || std::abs(beta * y(m - 1, 0)) <= options.tol * std::abs(theta(0));
    const bool done = target == LanczosTarget::Largest
                          ? out.largest_converged
                          : out.largest_converged && out.smallest_converged;
    if (done || invariant) break;
    betas.push_back(beta);
  }
  return out;
}

ConditionEstimate estimate_condition_number(const LinearOperator& op,
                                            const LinearOperator& preconditioner,
                                            std::size_t n, const LanczosOptions& options) {
  const auto ritz = lanczos_extremes(op, preconditioner, n, LanczosTarget::Both, options);
  ConditionEstimate est;
  est.lambda_max = ritz.largest;
  est.lambda_min = ritz.smallest;
  est.condition = ritz.largest / ritz.smallest;
  est.converged = ritz.largest_converged && ritz.smallest_converged && ritz.smallest > 0.0;
  est.iterations = ritz.iterations;
  return est;
}

ConditionEstimate dense_condition_number(const SparseMatrix& a, const BlockJacobi* preconditioner) {
  const Eigen::MatrixXd dense = a.to_dense();
  ConditionEstimate est;
  est.exact = true;
  est.converged = true;
  if (preconditioner) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dense.rows(), dense.cols());
    for (std::size_t b = 0; b < preconditioner->num_blocks(); ++b) {
      const auto idx = preconditioner->block_indices(b);
      const auto& blk = preconditioner->block(b);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
          p(static_cast<Index>(idx[i]), static_cast<Index>(idx[j])) =
              blk(static_cast<Index>(i), static_cast<Index>(j));
        }
      }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense, p, Eigen::EigenvaluesOnly);
    est.lambda_min = eig.eigenvalues()(0);
    est.lambda_max = eig.eigenvalues()(eig.eigenvalues().size() - 1);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense, Eigen::EigenvaluesOnly);
    est.lambda_min = eig.eigenvalues()(0);
    est.lambda_max = eig.eigenvalues()(eig.eigenvalues().size() - 1);
  }
  est.condition = est.lambda_max / est.lambda_min;
  return est;
}

ConditionEstimate estimate_condition_number(const SparseMatrix& a,
                                            const BlockJacobi* preconditioner,
                                            const LanczosOptions& options,
                                            ConditionMethod method, std::size_t dense_limit) {
  const std::size_t n = a.rows();
  if (method == ConditionMethod::Dense ||
      (method == ConditionMethod::Auto && n <= dense_limit)) {
    return dense_condition_number(a, preconditioner);
  }
  LinearOperator precondition;
  LinearOperator block_diagonal;
  if (preconditioner) {
    precondition = [preconditioner](std::span<const double> r, std::span<double> z) {
      preconditioner->apply(r, z);
    };
    block_diagonal = [preconditioner](std::span<const double> r, std::span<double> z) {
      preconditioner->multiply(r, z);
    };
  } else {
    block_diagonal = [](std::span<const double> r, std::span<double> z) {
      std::copy(r.begin(), r.end(), z.begin());
    };
  }
  const auto top = lanczos_extremes(as_operator(a), precondition, n, LanczosTarget::Largest, options);
  // lambda_min(P^{-1} A) = 1 / lambda_max of the pencil (P, A).
  const SparseCholesky factor(a);
  const LinearOperator inverse = [&factor](std::span<const double> r, std::span<double> z) {
    factor.solve(r, z);
  };
  const auto bottom = lanczos_extremes(block_diagonal, inverse, n, LanczosTarget::Largest, options);

  ConditionEstimate est;
  est.lambda_max = top.largest;
  est.lambda_min = 1.0 / bottom.largest;
  est.condition = est.lambda_max / est.lambda_min;
  est.converged = top.largest_converged && bottom.largest_converged;
  est.iterations = top.iterations + bottom.iterations;
  return est;
}

}  // namespace psdg
