#include "psdg/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace psdg {

double QuadratureRule::measure() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

GaussLegendre gauss_legendre(int points) {
  if (points < 1) throw std::invalid_argument("Gauss rule needs at least one point");
  const auto n = static_cast<Eigen::Index>(points);
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double beta = kk / std::sqrt(4.0 * kk * kk - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  GaussLegendre rule;
  rule.nodes.resize(static_cast<std::size_t>(points));
  rule.weights.resize(static_cast<std::size_t>(points));
  for (Eigen::Index k = 0; k < n; ++k) {
    rule.nodes[static_cast<std::size_t>(k)] = eig.eigenvalues()(k);
    const double v0 = eig.eigenvectors()(0, k);
    rule.weights[static_cast<std::size_t>(k)] = 2.0 * v0 * v0;
  }
  // Symmetrise to remove eigen-solver round-off.
  for (int k = 0; k < points / 2; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const auto j = static_cast<std::size_t>(points - 1 - k);
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (points % 2 == 1) rule.nodes[static_cast<std::size_t>(points / 2)] = 0.0;
  return rule;
}

QuadratureRule triangle_quadrature(Point a, Point b, Point c, int degree) {
  const double area = 0.5 * cross(b - a, c - a);
  if (!(area > 0.0)) throw std::invalid_argument("degenerate or clockwise triangle");
  // The collapsed direction carries one extra degree from the Jacobian.
  const int n = std::max(1, (degree + 2 + 1) / 2);
  const auto gl = gauss_legendre(n);
  QuadratureRule rule;
  rule.points.reserve(static_cast<std::size_t>(n * n));
  rule.weights.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (gl.nodes[static_cast<std::size_t>(i)] + 1.0);
    const double wu = 0.5 * gl.weights[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * (gl.nodes[static_cast<std::size_t>(j)] + 1.0);
      const double wv = 0.5 * gl.weights[static_cast<std::size_t>(j)];
      const double s = u;
      const double t = (1.0 - u) * v;
      rule.points.push_back(a + s * (b - a) + t * (c - a));
      rule.weights.push_back(2.0 * area * wu * wv * (1.0 - u));
    }
  }
  return rule;
}

QuadratureRule element_quadrature(std::span<const Point> polygon, int degree) {
  if (polygon.size() < 3 || !(polygon_signed_area(polygon) > 0.0)) {
    throw std::invalid_argument("degenerate polygon");
  }
  QuadratureRule rule;
  if (polygon.size() == 3) {
    return triangle_quadrature(polygon[0], polygon[1], polygon[2], degree);
  }
  const Point centre = polygon_centroid(polygon);
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point p = polygon[i];
    const Point q = polygon[(i + 1) % polygon.size()];
    if (!(cross(p - centre, q - centre) > 0.0)) {
      throw std::invalid_argument("polygon is not star-shaped with respect to its centroid");
    }
    auto sub = triangle_quadrature(centre, p, q, degree);
    rule.points.insert(rule.points.end(), sub.points.begin(), sub.points.end());
    rule.weights.insert(rule.weights.end(), sub.weights.begin(), sub.weights.end());
  }
  return rule;
}

QuadratureRule element_quadrature(const PolyMesh& mesh, std::size_t element, int degree) {
  const auto polygon = mesh.element_polygon(element);
  return element_quadrature(polygon, degree);
}

QuadratureRule face_quadrature(Point a, Point b, int degree) {
  const double length = distance(a, b);
  if (!(length > 0.0)) throw std::invalid_argument("zero-length face");
  const int n = std::max(1, (degree + 2) / 2);
  const auto gl = gauss_legendre(n);
  QuadratureRule rule;
  for (int i = 0; i < n; ++i) {
    const double s = 0.5 * (gl.nodes[static_cast<std::size_t>(i)] + 1.0);
    rule.points.push_back(a + s * (b - a));
    rule.weights.push_back(0.5 * length * gl.weights[static_cast<std::size_t>(i)]);
  }
  return rule;
}

QuadratureRule face_quadrature(const PolyMesh& mesh, std::size_t face, int degree) {
  const auto& f = mesh.faces()[face];
  return face_quadrature(mesh.vertices()[f.vertices[0]], mesh.vertices()[f.vertices[1]],
                         degree);
}

}  // namespace psdg
