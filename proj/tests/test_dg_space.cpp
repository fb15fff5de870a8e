#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "psdg/dg_space.hpp"
#include "support.hpp"

using namespace psdg;
using namespace psdg::testing;

TEST(DGSpace, LocalDimension) {
  const auto mesh = unit_square(2);
  EXPECT_EQ(DGSpace(mesh, 1).local_dim(), 3u);
  EXPECT_EQ(DGSpace(mesh, 3).local_dim(), 10u);
  const DGSpace s(mesh, 2);
  EXPECT_EQ(s.scalar_dofs(), 24u);
  EXPECT_EQ(s.total_dofs(), 96u);
  EXPECT_THROW(DGSpace(mesh, 0), std::invalid_argument);
}

TEST(DGSpace, ComponentMajorLayout) {
  const DGSpace s(unit_square(3), 2);
  EXPECT_EQ(s.dof(0, 0, 0), 0u);
  EXPECT_EQ(s.dof(0, 1, 0), 6u);
  EXPECT_EQ(s.dof(2, 4, 5), 2 * s.scalar_dofs() + 4 * 6 + 5);
  EXPECT_EQ(component_row(1), 0u);
  EXPECT_EQ(component_col(1), 1u);
  EXPECT_EQ(component_row(2), 1u);
  EXPECT_EQ(component_col(2), 0u);
}

TEST(DGSpace, GramMatrixIsIdentity) {
  const DGSpace single(unit_square(1), 2);
  EXPECT_LE((single.gram_matrix(0, 6) - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(),
            1e-12);
  const DGSpace poly(agglomerated_square(12, 20), 3);
  for (std::size_t e = 0; e < poly.num_elements(); ++e) {
    const Eigen::MatrixXd g = poly.gram_matrix(e, 2 * 3 + 2);
    EXPECT_LE((g - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-10) << e;
  }
}

TEST(DGSpace, FiniteDifferenceGradients) {
  const DGSpace s(agglomerated_square(8, 10), 3);
  const std::size_t ld = s.local_dim();
  std::vector<double> v(ld), vp(ld), vm(ld), dx(ld), dy(ld);
  const double eps = 1e-6;
  for (std::size_t e = 0; e < s.num_elements(); ++e) {
    const Point c = s.mesh().element_centroid(e);
    const Point x{c.x + 0.01, c.y - 0.02};
    s.evaluate_gradients(e, x, dx, dy);
    s.evaluate_basis(e, {x.x + eps, x.y}, vp);
    s.evaluate_basis(e, {x.x - eps, x.y}, vm);
    for (std::size_t i = 0; i < ld; ++i) {
      EXPECT_NEAR((vp[i] - vm[i]) / (2 * eps), dx[i], 1e-6 * std::max(1.0, std::abs(dx[i])));
    }
    s.evaluate_basis(e, {x.x, x.y + eps}, vp);
    s.evaluate_basis(e, {x.x, x.y - eps}, vm);
    for (std::size_t i = 0; i < ld; ++i) {
      EXPECT_NEAR((vp[i] - vm[i]) / (2 * eps), dy[i], 1e-6 * std::max(1.0, std::abs(dy[i])));
    }
  }
}

TEST(DGSpace, ProjectZero) {
  const DGSpace s(unit_square(2), 2);
  for (double v : l2_project(s, [](Point) { return Tensor{}; })) EXPECT_EQ(v, 0.0);
}

TEST(DGSpace, ProjectionReproducesPolynomials) {
  const auto field = [](Point x) {
    return Tensor{1.0 + x.x * x.x, x.x * x.y - 2.0, 3.0 * x.y * x.y * x.x, x.x - x.y * x.y};
  };
  for (BasisKind kind : {BasisKind::Orthonormal, BasisKind::Monomial}) {
    const DGSpace s(agglomerated_square(6, 9), 3, kind);
    const auto dofs = l2_project(s, field);
    // Global monomials are poorly conditioned away from the origin.
    const double tol = kind == BasisKind::Orthonormal ? 1e-12 : 1e-8;
    for (std::size_t e = 0; e < s.num_elements(); ++e) {
      const auto rule = element_quadrature(s.mesh(), e, 7);
      for (const Point& x : rule.points) {
        const Tensor got = evaluate_field(s, dofs, e, x);
        const Tensor want = field(x);
        for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(got[c], want[c], tol);
      }
    }
  }
}

TEST(DGSpace, DivergenceOfProjectedPolynomial) {
  const DGSpace s(unit_square(3), 2);
  const auto dofs =
      l2_project(s, [](Point x) { return Tensor{x.x * x.x, x.y, x.x * x.y, x.y * x.y}; });
  const Vec2 d = evaluate_divergence(s, dofs, 4, {0.5, 0.4});
  EXPECT_NEAR(d.x, 2 * 0.5 + 1.0, 1e-12);
  EXPECT_NEAR(d.y, 0.4 + 2 * 0.4, 1e-12);
}

TEST(DGSpace, ProjectionConvergesAtOrderPPlusOne) {
  const auto field = [](Point x) {
    const double s = std::sin(std::numbers::pi * x.x);
    return Tensor{s, 0.0, 0.0, s};
  };
  auto l2_error = [&](int n) {
    const DGSpace s(unit_square(n), 3);
    const auto dofs = l2_project(s, field);
    double err = 0.0;
    for (std::size_t e = 0; e < s.num_elements(); ++e) {
      const auto rule = element_quadrature(s.mesh(), e, 14);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Tensor got = evaluate_field(s, dofs, e, rule.points[q]);
        const Tensor want = field(rule.points[q]);
        for (std::size_t c = 0; c < 4; ++c) {
          err += rule.weights[q] * (got[c] - want[c]) * (got[c] - want[c]);
        }
      }
    }
    return std::sqrt(err);
  };
  const double e4 = l2_error(4), e8 = l2_error(8);
  EXPECT_GE(std::log2(e4 / e8), 3.8);
}

TEST(DGSpace, Deviator) {
  const Tensor d = deviator({3.0, 1.0, 2.0, 5.0});
  EXPECT_DOUBLE_EQ(d[0], -1.0);
  EXPECT_DOUBLE_EQ(d[3], 1.0);
  EXPECT_DOUBLE_EQ(d[1], 1.0);
  EXPECT_DOUBLE_EQ(d[2], 2.0);
}
