#pragma once

#include <span>
#include <vector>

#include "psdg/mesh.hpp"

namespace psdg {

struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  double measure() const;
};

/// n-point Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int points);

/// Collapsed (Duffy) tensor Gauss rule on a triangle, exact for total degree
/// `degree`, all weights positive.
QuadratureRule triangle_quadrature(Point a, Point b, Point c, int degree);

/// Rule on a polygon obtained by splitting it into triangles from its
/// centroid. Throws std::invalid_argument if a sub-triangle is degenerate
/// (the polygon is not star-shaped with respect to its centroid).
QuadratureRule element_quadrature(std::span<const Point> polygon, int degree);
QuadratureRule element_quadrature(const PolyMesh& mesh, std::size_t element, int degree);

/// Gauss rule on the segment [a, b]; points are 2D positions along it.
QuadratureRule face_quadrature(Point a, Point b, int degree);
QuadratureRule face_quadrature(const PolyMesh& mesh, std::size_t face, int degree);

}  // namespace psdg
