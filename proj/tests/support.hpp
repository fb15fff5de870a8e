#pragma once

#include <Eigen/Dense>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "psdg/assembly.hpp"
#include "psdg/mesh.hpp"

namespace psdg::testing {

inline std::shared_ptr<const PolyMesh> unit_square(int n, const std::string& neumann = "right") {
  return std::make_shared<const PolyMesh>(
      classify_boundary(build_cartesian_mesh(n, n), neumann_predicate(neumann)));
}

inline std::shared_ptr<const PolyMesh> agglomerated_square(int n, std::size_t target,
                                                           const std::string& neumann = "right",
                                                           std::uint64_t seed = 7) {
  return std::make_shared<const PolyMesh>(classify_boundary(
      agglomerate(build_cartesian_mesh(n, n), target, seed), neumann_predicate(neumann)));
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0,
                                         double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(gen);
  return v;
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline double relative_error(const std::vector<double>& x, const Eigen::VectorXd& ref) {
  return (to_eigen(x) - ref).norm() / ref.norm();
}

inline Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& a) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace psdg::testing
