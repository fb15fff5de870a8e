#pragma once

#include <array>
#include <functional>
#include <vector>

#include "psdg/dg_space.hpp"

namespace psdg {

/// Data of the unsteady pseudo-stress problem. Empty functions mean zero.
struct ProblemData {
  std::function<Tensor(Point, double)> source;
  /// Value of div(sigma) on Dirichlet faces.
  std::function<Vec2(Point, double)> dirichlet;
  /// Traction sigma n on Neumann faces; receives the outward normal.
  std::function<Vec2(Point, double, Vec2)> neumann;
  TensorField initial;
  double mu = 1.0;
};

/// One-dimensional factor of a separable term: s^power, or sin(freq s + phase).
struct Factor1D {
  enum class Kind { Power, Sine };
  Kind kind = Kind::Power;
  int power = 0;
  double freq = 0.0;
  double phase = 0.0;

  static Factor1D monomial(int power) { return {Kind::Power, power, 0.0, 0.0}; }
  static Factor1D sine(double freq, double phase = 0.0) {
    return {Kind::Sine, 0, freq, phase};
  }
  /// d^order/ds^order evaluated at s.
  double derivative(double s, int order) const;
};

struct SeparableTerm {
  double amplitude = 1.0;
  Factor1D fx;
  Factor1D fy;
};

/// Time profile g(t) multiplying the spatial field.
enum class TimeProfile {
  Steady,     ///< g = 1
  Decay,      ///< g = exp(-t)
  Oscillate,  ///< g = cos(t) + 2
};

/// Exact field sigma(x, t) = g(t) S(x) with every component of S a sum of
/// separable terms, so all derivatives are available in closed form.
class ExactField {
 public:
  ExactField() = default;
  ExactField(std::array<std::vector<SeparableTerm>, 4> components, TimeProfile profile);

  /// Polynomial field of total degree `degree` with fixed coefficients.
  static ExactField polynomial(int degree, TimeProfile profile = TimeProfile::Steady);
  /// Smooth non-polynomial field built from sines and cosines.
  static ExactField trigonometric(TimeProfile profile = TimeProfile::Steady);

  Tensor value(Point x, double t) const;
  Tensor time_derivative(Point x, double t) const;
  /// Row-wise divergence.
  Vec2 divergence(Point x, double t) const;
  /// Gradient of the divergence, (grad v)_{kj} = d_j v_k, row-major.
  Tensor divergence_gradient(Point x, double t) const;
  Vec2 traction(Point x, double t, Vec2 normal) const;

  double g(double t) const;
  double g_prime(double t) const;
  TimeProfile profile() const { return profile_; }

  TensorField at(double t) const {
    return [*this, t](Point x) { return value(x, t); };
  }

 private:
  double component_derivative(std::size_t c, Point x, int dx, int dy) const;

  std::array<std::vector<SeparableTerm>, 4> components_;
  TimeProfile profile_ = TimeProfile::Steady;
};

/// Data (F, g_D, g_N, sigma_0) for which `exact` solves the strong problem
/// (1/mu) d_t dev(sigma) - grad(div sigma) = F.
ProblemData manufactured_problem(const ExactField& exact, double mu = 1.0);

}  // namespace psdg
