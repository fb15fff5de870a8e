#include "psdg/dg_space.hpp"

#include <cmath>
#include <stdexcept>

namespace psdg {

namespace {

// Legendre polynomials P_0..P_n and derivatives at s.
void legendre(int n, double s, double* p, double* dp) {
  p[0] = 1.0;
  dp[0] = 0.0;
  if (n == 0) return;
  p[1] = s;
  dp[1] = 1.0;
  for (int k = 1; k < n; ++k) {
    p[k + 1] = ((2.0 * k + 1.0) * s * p[k] - k * p[k - 1]) / (k + 1.0);
    dp[k + 1] = dp[k - 1] + (2.0 * k + 1.0) * p[k];
  }
}

void monomials(int n, double s, double* p, double* dp) {
  p[0] = 1.0;
  dp[0] = 0.0;
  for (int k = 1; k <= n; ++k) {
    p[k] = p[k - 1] * s;
    dp[k] = k * p[k - 1];
  }
}

}  // namespace

DGSpace::DGSpace(std::shared_ptr<const PolyMesh> mesh, int degree, BasisKind kind)
    : mesh_(std::move(mesh)), degree_(degree), kind_(kind) {
  if (!mesh_) throw std::invalid_argument("DG space needs a mesh");
  if (degree < 1) throw std::invalid_argument("polynomial degree must be at least 1");
  if (degree > 15) throw std::invalid_argument("polynomial degree above 15 is not supported");
  local_dim_ = static_cast<std::size_t>((degree + 1) * (degree + 2) / 2);
  for (int k = 0; k <= degree; ++k) {
    for (int a = k; a >= 0; --a) exponents_.push_back({a, k - a});
  }

  const std::size_t ne = mesh_->num_elements();
  frames_.resize(ne);
  transforms_.assign(ne, Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(local_dim_),
                                                   static_cast<Eigen::Index>(local_dim_)));
  for (std::size_t e = 0; e < ne; ++e) {
    Point lo = mesh_->vertices()[mesh_->elements()[e].front()];
    Point hi = lo;
    for (auto v : mesh_->elements()[e]) {
      const Point p = mesh_->vertices()[v];
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    frames_[e] = {0.5 * (lo + hi), 0.5 * (hi - lo)};
  }
  if (kind_ == BasisKind::Monomial) return;

  std::ptrdiff_t failed = -1;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ie = 0; ie < static_cast<std::ptrdiff_t>(ne); ++ie) {
    const auto e = static_cast<std::size_t>(ie);
    // Two Cholesky passes: the second corrects round-off of the first.
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::MatrixXd gram = gram_matrix(e, 2 * degree_);
      Eigen::LLT<Eigen::MatrixXd> llt(gram);
      if (llt.info() != Eigen::Success) {
#pragma omp critical
        failed = ie;
        break;
      }
      const Eigen::MatrixXd l_inv = llt.matrixL().solve(
          Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
      transforms_[e] = l_inv * transforms_[e];
    }
  }
  if (failed >= 0) {
    throw std::runtime_error("basis Gram matrix is singular on element " +
                             std::to_string(failed));
  }
}

void DGSpace::raw_basis(std::size_t element, Point x, double* values, double* dx,
                        double* dy) const {
  constexpr int kMax = 16;
  double px[kMax], dpx[kMax], py[kMax], dpy[kMax];
  double sx = 1.0;
  double sy = 1.0;
  if (kind_ == BasisKind::Orthonormal) {
    const Frame& f = frames_[element];
    sx = 1.0 / f.half_width.x;
    sy = 1.0 / f.half_width.y;
    legendre(degree_, (x.x - f.centre.x) * sx, px, dpx);
    legendre(degree_, (x.y - f.centre.y) * sy, py, dpy);
  } else {
    monomials(degree_, x.x, px, dpx);
    monomials(degree_, x.y, py, dpy);
  }
  for (std::size_t i = 0; i < local_dim_; ++i) {
    const auto [a, b] = exponents_[i];
    if (values) values[i] = px[a] * py[b];
    if (dx) dx[i] = sx * dpx[a] * py[b];
    if (dy) dy[i] = sy * px[a] * dpy[b];
  }
}

void DGSpace::evaluate_basis(std::size_t element, Point x, std::span<double> values) const {
  double raw[136];
  raw_basis(element, x, raw, nullptr, nullptr);
  const auto& t = transforms_[element];
  for (std::size_t i = 0; i < local_dim_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j <= i; ++j) {
      s += t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * raw[j];
    }
    values[i] = s;
  }
}

void DGSpace::evaluate_gradients(std::size_t element, Point x, std::span<double> dx,
                                 std::span<double> dy) const {
  double rx[136], ry[136];
  raw_basis(element, x, nullptr, rx, ry);
  const auto& t = transforms_[element];
  for (std::size_t i = 0; i < local_dim_; ++i) {
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t j = 0; j <= i; ++j) {
      const double c = t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      sx += c * rx[j];
      sy += c * ry[j];
    }
    dx[i] = sx;
    dy[i] = sy;
  }
}

Eigen::MatrixXd DGSpace::gram_matrix(std::size_t element, int quadrature_degree) const {
  const auto rule = element_quadrature(*mesh_, element, quadrature_degree);
  const auto n = static_cast<Eigen::Index>(local_dim_);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd phi(n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    evaluate_basis(element, rule.points[q], std::span<double>(phi.data(), local_dim_));
    gram.noalias() += rule.weights[q] * phi * phi.transpose();
  }
  return gram;
}

DGSpace build_space(std::shared_ptr<const PolyMesh> mesh, int degree, BasisKind kind) {
  return DGSpace(std::move(mesh), degree, kind);
}

std::vector<double> l2_project(const DGSpace& space, const TensorField& field) {
  std::vector<double> dofs(space.total_dofs(), 0.0);
  const std::size_t ld = space.local_dim();
  const auto n = static_cast<Eigen::Index>(ld);
  const int qdeg = space.assembly_degree() + 2;
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    const auto rule = element_quadrature(space.mesh(), e, qdeg);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, kComponents);
    Eigen::VectorXd phi(n);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      space.evaluate_basis(e, rule.points[q], std::span<double>(phi.data(), ld));
      const Tensor value = field(rule.points[q]);
      for (std::size_t c = 0; c < kComponents; ++c) {
        rhs.col(static_cast<Eigen::Index>(c)) += rule.weights[q] * value[c] * phi;
      }
    }
    Eigen::MatrixXd coeffs = rhs;
    if (space.basis_kind() != BasisKind::Orthonormal) {
      coeffs = space.gram_matrix(e, 2 * space.degree()).llt().solve(rhs);
    }
    for (std::size_t c = 0; c < kComponents; ++c) {
      for (std::size_t i = 0; i < ld; ++i) {
        dofs[space.dof(c, e, i)] =
            coeffs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
      }
    }
  }
  return dofs;
}

Tensor evaluate_field(const DGSpace& space, std::span<const double> dofs,
                      std::size_t element, Point x) {
  std::vector<double> phi(space.local_dim());
  space.evaluate_basis(element, x, phi);
  Tensor t{};
  for (std::size_t c = 0; c < kComponents; ++c) {
    for (std::size_t i = 0; i < phi.size(); ++i) {
      t[c] += dofs[space.dof(c, element, i)] * phi[i];
    }
  }
  return t;
}

Vec2 evaluate_divergence(const DGSpace& space, std::span<const double> dofs,
                         std::size_t element, Point x) {
  const std::size_t ld = space.local_dim();
  std::vector<double> dx(ld), dy(ld);
  space.evaluate_gradients(element, x, dx, dy);
  double div[2] = {0.0, 0.0};
  for (std::size_t c = 0; c < kComponents; ++c) {
    const auto& grad = component_col(c) == 0 ? dx : dy;
    for (std::size_t i = 0; i < ld; ++i) {
      div[component_row(c)] += dofs[space.dof(c, element, i)] * grad[i];
    }
  }
  return {div[0], div[1]};
}

Tensor deviator(const Tensor& t) {
  const double half_trace = 0.5 * (t[0] + t[3]);
  return {t[0] - half_trace, t[1], t[2], t[3] - half_trace};
}

}  // namespace psdg
