#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "psdg/mesh.hpp"
#include "psdg/quadrature.hpp"

namespace psdg {

/// 2x2 tensor stored row-major: (s11, s12, s21, s22).
using Tensor = std::array<double, 4>;
using Vec2 = Point;
using TensorField = std::function<Tensor(Point)>;

/// Tensor components in dof order.
inline constexpr std::size_t kComponents = 4;
/// Row (k) and column (a) index of tensor component c = 2k + a.
inline constexpr std::size_t component_row(std::size_t c) { return c / 2; }
inline constexpr std::size_t component_col(std::size_t c) { return c % 2; }

enum class BasisKind {
  /// Scaled Legendre products on the element bounding box, orthonormalised
  /// in L2(element).
  Orthonormal,
  /// Raw monomials x^a y^b in global coordinates (testing aid).
  Monomial,
};

/// Discontinuous tensor-valued polynomial space of uniform total degree p.
///
/// Global dof index = c * scalar_dofs + e * local_dim + i, with component c in
/// {0: s11, 1: s12, 2: s21, 3: s22}.
class DGSpace {
 public:
  DGSpace(std::shared_ptr<const PolyMesh> mesh, int degree,
          BasisKind kind = BasisKind::Orthonormal);

  const PolyMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const PolyMesh> mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  BasisKind basis_kind() const { return kind_; }
  std::size_t num_elements() const { return mesh_->num_elements(); }
  std::size_t local_dim() const { return local_dim_; }
  std::size_t scalar_dofs() const { return local_dim_ * num_elements(); }
  std::size_t total_dofs() const { return kComponents * scalar_dofs(); }
  std::size_t dof(std::size_t component, std::size_t element, std::size_t i) const {
    return component * scalar_dofs() + element * local_dim_ + i;
  }
  /// Exactness degree used by assembly quadrature (2p + 1).
  int assembly_degree() const { return 2 * degree_ + 1; }

  void evaluate_basis(std::size_t element, Point x, std::span<double> values) const;
  void evaluate_gradients(std::size_t element, Point x, std::span<double> dx,
                          std::span<double> dy) const;
  /// Element Gram matrix of the basis under a rule of the given exactness.
  Eigen::MatrixXd gram_matrix(std::size_t element, int quadrature_degree) const;

 private:
  void raw_basis(std::size_t element, Point x, double* values, double* dx,
                 double* dy) const;

  struct Frame {
    Point centre;
    Point half_width;
  };

  std::shared_ptr<const PolyMesh> mesh_;
  int degree_ = 1;
  BasisKind kind_ = BasisKind::Orthonormal;
  std::size_t local_dim_ = 0;
  std::vector<std::array<int, 2>> exponents_;
  std::vector<Frame> frames_;
  // phi = transform * raw basis (lower triangular, identity for monomials).
  std::vector<Eigen::MatrixXd> transforms_;
};

DGSpace build_space(std::shared_ptr<const PolyMesh> mesh, int degree,
                    BasisKind kind = BasisKind::Orthonormal);

/// Elementwise, component-wise L2 projection.
std::vector<double> l2_project(const DGSpace& space, const TensorField& field);

Tensor evaluate_field(const DGSpace& space, std::span<const double> dofs,
                      std::size_t element, Point x);
/// Row-wise divergence of the discrete field inside an element.
Vec2 evaluate_divergence(const DGSpace& space, std::span<const double> dofs,
                         std::size_t element, Point x);

/// Trace-free part: t - tr(t)/2 I.
Tensor deviator(const Tensor& t);

}  // namespace psdg
