#include <gtest/gtest.h>

#include <cmath>

#include "psdg/deflation.hpp"
#include "support.hpp"

using namespace psdg;
using namespace psdg::testing;

namespace {

struct Fixture {
  std::unique_ptr<DGSpace> space;
  SystemMatrices sys;
  SparseMatrix star;
  double dt;
};

Fixture make(int n, int p, double dt, const std::string& neumann = "right") {
  Fixture f;
  f.space = std::make_unique<DGSpace>(unit_square(n, neumann), p);
  f.sys = assemble_system(*f.space);
  f.star = build_system(f.sys.M, f.sys.A, dt);
  f.dt = dt;
  return f;
}

}  // namespace

TEST(Deflation, CoarseMatrixIsHalfDtTraceLaplacian) {
  for (double dt : {1e-1, 1e-4, 1e-8}) {
    const auto f = make(2, 1, dt);
    const Deflator d(f.star, f.sys.scalar_dofs());
    const auto want = add(f.sys.B1, dt / 2, f.sys.B3, dt / 2);
    EXPECT_LE(max_abs_difference(d.coarse_matrix(), want), 1e-12);
  }
}

TEST(Deflation, BasisSpansMassKernel) {
  const auto f = make(3, 2, 1e-3);
  const Deflator d(f.star, f.sys.scalar_dofs());
  const auto w = random_vector(d.coarse_size(), 1);
  std::vector<double> v(d.size());
  d.prolong(w, v);
  EXPECT_LE(norm2(f.sys.M * v), 1e-12);
  std::vector<double> back(d.coarse_size());
  d.restrict_to_coarse(v, back);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(back[i], w[i], 1e-15);
}

TEST(Deflation, CoarseMatrixIsSpd) {
  const auto f = make(2, 1, 1e-3);
  const Deflator d(f.star, f.sys.scalar_dofs());
  EXPECT_GT(eigenvalues(d.coarse_matrix().to_dense()).minCoeff(), 0.0);
}

TEST(Deflation, SingularCoarseMatrixThrows) {
  // Without Neumann faces the global constant trace field lies in ker(A) and
  // ker(M), so W is singular.
  const auto f = make(2, 1, 1e-3, "none");
  EXPECT_THROW(Deflator(f.star, f.sys.scalar_dofs()), std::runtime_error);
  EXPECT_THROW(Deflator(f.star, 5), std::invalid_argument);
}

TEST(Deflation, SolutionInCoarseSpace) {
  const auto f = make(3, 1, 1e-3);
  const Deflator d(f.star, f.sys.scalar_dofs());
  const auto w = random_vector(d.coarse_size(), 2);
  std::vector<double> x(d.size());
  d.prolong(w, x);
  const auto b = f.star * x;
  const auto res = deflated_cg(d, b, {});
  EXPECT_LE(res.report.iterations, 1u);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(res.x[i], x[i], 1e-8);
}

TEST(Deflation, MatchesDenseSolve) {
  for (int n : {2, 4}) {
    const auto f = make(n, 1, 1e-5);
    const Deflator d(f.star, f.sys.scalar_dofs());
    const auto b = random_vector(d.size(), 3);
    const Eigen::VectorXd ref = f.star.to_dense().ldlt().solve(to_eigen(b));
    SolverConfig cfg;
    cfg.tol = 1e-12;
    const auto res = deflated_cg(d, b, cfg);
    EXPECT_TRUE(res.report.converged);
    EXPECT_LE(relative_error(res.x, ref), 1e-7);
    const auto r = f.star * res.x;
    double rn = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) rn += (b[i] - r[i]) * (b[i] - r[i]);
    EXPECT_LE(std::sqrt(rn) / norm2(b), cfg.tol);
  }
}

TEST(Deflation, UnattainableToleranceKeepsBestIterate) {
  const auto f = make(2, 1, 1e-6);
  const Deflator d(f.star, f.sys.scalar_dofs());
  const auto b = random_vector(d.size(), 4);
  SolverConfig cfg;
  cfg.tol = 1e-16;
  const auto res = deflated_cg(d, b, cfg);
  EXPECT_FALSE(res.report.converged);
  const auto r = f.star * res.x;
  double rn = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) rn += (b[i] - r[i]) * (b[i] - r[i]);
  EXPECT_NEAR(std::sqrt(rn) / norm2(b), res.report.relative_residual, 1e-14);
  EXPECT_LE(res.report.relative_residual, 1e-9);
}

TEST(Deflation, ProjectorAlgebra) {
  const auto f = make(4, 2, 1e-6);
  const Deflator d(f.star, f.sys.scalar_dofs());
  const std::size_t n = d.size();
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto u = random_vector(n, 100 + k);
    const auto w = random_vector(d.coarse_size(), 200 + k);
    std::vector<double> pu(n), ppu(n), apu(n), vw(n);
    d.project(u, pu);
    d.project(pu, ppu);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(ppu[i], pu[i], 1e-12 * norm2(u));
    d.apply_deflated(u, apu);
    d.prolong(w, vw);
    const double scale = f.star.max_abs() * norm2(u) * norm2(w);
    EXPECT_LE(std::abs(dot(apu, vw)), 1e-10 * scale);
    EXPECT_GE(dot(apu, u), -1e-10 * f.star.max_abs() * dot(u, u));
  }
}

TEST(Deflation, TransposeProjector) {
  const auto f = make(3, 1, 1e-3);
  const Deflator d(f.star, f.sys.scalar_dofs());
  const auto u = random_vector(d.size(), 4), r = random_vector(d.size(), 5);
  std::vector<double> pu(d.size()), ptr(d.size());
  d.project(u, pu);
  d.project_transpose(r, ptr);
  EXPECT_NEAR(dot(pu, r), dot(u, ptr), 1e-12 * norm2(u) * norm2(r));
}

TEST(Deflation, ZeroRightHandSide) {
  const auto f = make(2, 1, 1e-3);
  const Deflator d(f.star, f.sys.scalar_dofs());
  const auto res = deflated_cg(d, std::vector<double>(d.size(), 0.0), {});
  EXPECT_EQ(res.report.iterations, 0u);
  EXPECT_TRUE(res.report.converged);
}
