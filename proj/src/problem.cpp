#include "psdg/problem.hpp"

#include <cmath>
#include <numbers>

namespace psdg {

double Factor1D::derivative(double s, int order) const {
  if (kind == Kind::Sine) {
    // d^k sin(w s + phi) = w^k sin(w s + phi + k pi / 2)
    return std::pow(freq, order) *
           std::sin(freq * s + phase + order * 0.5 * std::numbers::pi);
  }
  if (order > power) return 0.0;
  double coeff = 1.0;
  for (int k = 0; k < order; ++k) coeff *= power - k;
  return coeff * std::pow(s, power - order);
}

ExactField::ExactField(std::array<std::vector<SeparableTerm>, 4> components,
                       TimeProfile profile)
    : components_(std::move(components)), profile_(profile) {}

ExactField ExactField::polynomial(int degree, TimeProfile profile) {
  std::array<std::vector<SeparableTerm>, 4> comps;
  for (std::size_t c = 0; c < 4; ++c) {
    for (int k = 0; k <= degree; ++k) {
      for (int a = k; a >= 0; --a) {
        const int b = k - a;
        // Arbitrary fixed coefficients in [-0.5, 0.5].
        const double amp = static_cast<double>((3 * static_cast<int>(c) + 5 * a + 7 * b + 1) % 11) / 10.0 - 0.5;
        if (amp == 0.0) continue;
        comps[c].push_back({amp, Factor1D::monomial(a), Factor1D::monomial(b)});
      }
    }
  }
  return ExactField(std::move(comps), profile);
}

ExactField ExactField::trigonometric(TimeProfile profile) {
  constexpr double pi = std::numbers::pi;
  constexpr double half_pi = 0.5 * pi;
  std::array<std::vector<SeparableTerm>, 4> comps;
  comps[0] = {{1.0, Factor1D::sine(pi), Factor1D::sine(pi, half_pi)}};
  comps[1] = {{0.5, Factor1D::sine(2.0 * pi, half_pi), Factor1D::sine(pi)}};
  comps[2] = {{0.8, Factor1D::sine(pi, 0.3), Factor1D::sine(pi)}};
  comps[3] = {{1.0, Factor1D::sine(pi, half_pi), Factor1D::sine(pi, half_pi + 0.5)},
              {0.3, Factor1D::monomial(0), Factor1D::monomial(0)}};
  return ExactField(std::move(comps), profile);
}

double ExactField::g(double t) const {
  switch (profile_) {
    case TimeProfile::Steady: return 1.0;
    case TimeProfile::Decay: return std::exp(-t);
    case TimeProfile::Oscillate: return std::cos(t) + 2.0;
  }
  return 1.0;
}

double ExactField::g_prime(double t) const {
  switch (profile_) {
    case TimeProfile::Steady: return 0.0;
    case TimeProfile::Decay: return -std::exp(-t);
    case TimeProfile::Oscillate: return -std::sin(t);
  }
  return 0.0;
}

double ExactField::component_derivative(std::size_t c, Point x, int dx, int dy) const {
  double s = 0.0;
  for (const auto& term : components_[c]) {
    s += term.amplitude * term.fx.derivative(x.x, dx) * term.fy.derivative(x.y, dy);
  }
  return s;
}

Tensor ExactField::value(Point x, double t) const {
  const double gt = g(t);
  Tensor v{};
  for (std::size_t c = 0; c < 4; ++c) v[c] = gt * component_derivative(c, x, 0, 0);
  return v;
}

Tensor ExactField::time_derivative(Point x, double t) const {
  const double gp = g_prime(t);
  Tensor v{};
  for (std::size_t c = 0; c < 4; ++c) v[c] = gp * component_derivative(c, x, 0, 0);
  return v;
}

Vec2 ExactField::divergence(Point x, double t) const {
  const double gt = g(t);
  return {gt * (component_derivative(0, x, 1, 0) + component_derivative(1, x, 0, 1)),
          gt * (component_derivative(2, x, 1, 0) + component_derivative(3, x, 0, 1))};
}

Tensor ExactField::divergence_gradient(Point x, double t) const {
  const double gt = g(t);
  Tensor v{};
  for (std::size_t k = 0; k < 2; ++k) {
    const std::size_t cx = 2 * k;
    const std::size_t cy = 2 * k + 1;
    v[2 * k] = gt * (component_derivative(cx, x, 2, 0) + component_derivative(cy, x, 1, 1));
    v[2 * k + 1] = gt * (component_derivative(cx, x, 1, 1) + component_derivative(cy, x, 0, 2));
  }
  return v;
}

Vec2 ExactField::traction(Point x, double t, Vec2 normal) const {
  const Tensor s = value(x, t);
  return {s[0] * normal.x + s[1] * normal.y, s[2] * normal.x + s[3] * normal.y};
}

ProblemData manufactured_problem(const ExactField& exact, double mu) {
  ProblemData data;
  data.mu = mu;
  data.source = [exact, mu](Point x, double t) {
    const Tensor dev_dt = deviator(exact.time_derivative(x, t));
    const Tensor gd = exact.divergence_gradient(x, t);
    Tensor f{};
    for (std::size_t c = 0; c < 4; ++c) f[c] = dev_dt[c] / mu - gd[c];
    return f;
  };
  data.dirichlet = [exact](Point x, double t) { return exact.divergence(x, t); };
  data.neumann = [exact](Point x, double t, Vec2 n) { return exact.traction(x, t, n); };
  data.initial = exact.at(0.0);
  return data;
}

}  // namespace psdg
