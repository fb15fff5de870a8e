#include "psdg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace psdg {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

Index idx(std::size_t i) { return static_cast<Index>(i); }

// Basis values and gradients of one element at one point.
struct BasisSample {
  std::vector<double> phi;
  std::array<std::vector<double>, 2> grad;

  explicit BasisSample(std::size_t n) : phi(n), grad{std::vector<double>(n), std::vector<double>(n)} {}
  void fill(const DGSpace& space, std::size_t e, Point x) {
    space.evaluate_basis(e, x, phi);
    space.evaluate_gradients(e, x, grad[0], grad[1]);
  }
};

double component(Point p, std::size_t axis) { return axis == 0 ? p.x : p.y; }

Tensor unit_tensor(std::size_t c) {
  Tensor t{};
  t[c] = 1.0;
  return t;
}

// Scatter of a dense element-pair block into triplets.
void scatter_tensor(const DGSpace& space, const MatrixXd& local, std::size_t test_elem,
                    std::size_t trial_elem, std::vector<Triplet>& out) {
  const std::size_t ld = space.local_dim();
  for (std::size_t c = 0; c < kComponents; ++c) {
    for (std::size_t i = 0; i < ld; ++i) {
      for (std::size_t d = 0; d < kComponents; ++d) {
        for (std::size_t j = 0; j < ld; ++j) {
          const double v = local(idx(c * ld + i), idx(d * ld + j));
          if (v != 0.0) {
            out.push_back({space.dof(c, test_elem, i), space.dof(d, trial_elem, j), v});
          }
        }
      }
    }
  }
}

void scatter_scalar(std::size_t ld, const MatrixXd& local, std::size_t test_elem,
                    std::size_t trial_elem, std::vector<Triplet>& out) {
  for (std::size_t i = 0; i < ld; ++i) {
    for (std::size_t j = 0; j < ld; ++j) {
      const double v = local(idx(i), idx(j));
      if (v != 0.0) out.push_back({test_elem * ld + i, trial_elem * ld + j, v});
    }
  }
}

std::vector<Triplet> concatenate(std::vector<std::vector<Triplet>>& parts) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<Triplet> all;
  all.reserve(total);
  for (auto& p : parts) {
    all.insert(all.end(), p.begin(), p.end());
    p.clear();
    p.shrink_to_fit();
  }
  return all;
}

bool carries_stiffness_terms(const Face& f) { return f.kind != FaceKind::Dirichlet; }

}  // namespace

Eigen::Matrix4d deviatoric_factor() {
  Eigen::Matrix4d k;
  k << 0.5, 0.0, 0.0, -0.5,
       0.0, 1.0, 0.0, 0.0,
       0.0, 0.0, 1.0, 0.0,
      -0.5, 0.0, 0.0, 0.5;
  return k;
}

double penalty(const PolyMesh& mesh, std::size_t face, double alpha, int degree) {
  const Face& f = mesh.faces()[face];
  if (f.kind == FaceKind::Dirichlet) {
    throw std::logic_error("penalty is defined on interior and Neumann faces only (face " +
                           std::to_string(face) + " is Dirichlet)");
  }
  const double p2 = static_cast<double>(degree) * degree;
  double weight = p2 / mesh.element_diameter(f.plus);
  if (f.minus) weight = std::max(weight, p2 / mesh.element_diameter(*f.minus));
  return alpha * weight;
}

MassMatrices assemble_mass(const DGSpace& space, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("viscosity must be positive");
  const std::size_t ne = space.num_elements();
  const std::size_t ld = space.local_dim();
  const std::size_t n = space.total_dofs();

  // dev(E_c) : dev(E_d) for unit tensors, evaluated through the deviator.
  Eigen::Matrix4d contraction;
  for (std::size_t c = 0; c < kComponents; ++c) {
    for (std::size_t d = 0; d < kComponents; ++d) {
      const Tensor a = deviator(unit_tensor(c));
      const Tensor b = deviator(unit_tensor(d));
      double s = 0.0;
      for (std::size_t k = 0; k < 4; ++k) s += a[k] * b[k];
      contraction(idx(c), idx(d)) = s / mu;
    }
  }

  std::vector<std::vector<Triplet>> scalar_parts(ne), tensor_parts(ne);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ie = 0; ie < static_cast<std::ptrdiff_t>(ne); ++ie) {
    const auto e = static_cast<std::size_t>(ie);
    const auto rule = element_quadrature(space.mesh(), e, space.assembly_degree());
    MatrixXd m1 = MatrixXd::Zero(idx(ld), idx(ld));
    std::vector<double> phi(ld);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      space.evaluate_basis(e, rule.points[q], phi);
      const Eigen::Map<const Eigen::VectorXd> v(phi.data(), idx(ld));
      m1.noalias() += rule.weights[q] * v * v.transpose();
    }
    MatrixXd local = MatrixXd::Zero(idx(kComponents * ld), idx(kComponents * ld));
    for (std::size_t c = 0; c < kComponents; ++c) {
      for (std::size_t d = 0; d < kComponents; ++d) {
        const double k = contraction(idx(c), idx(d));
        if (k != 0.0) local.block(idx(c * ld), idx(d * ld), idx(ld), idx(ld)) = k * m1;
      }
    }
    scatter_scalar(ld, m1, e, e, scalar_parts[e]);
    scatter_tensor(space, local, e, e, tensor_parts[e]);
  }

  MassMatrices out;
  out.K = deviatoric_factor() / mu;
  out.M1 = SparseMatrix::from_triplets(space.scalar_dofs(), space.scalar_dofs(),
                                       concatenate(scalar_parts), kAssemblyDropTolerance);
  out.M = SparseMatrix::from_triplets(n, n, concatenate(tensor_parts), kAssemblyDropTolerance);
  return out;
}

StiffnessMatrices assemble_stiffness(const DGSpace& space, double alpha,
                                     const StiffnessOptions& options) {
  if (alpha < 0.0) throw std::invalid_argument("penalty coefficient must be non-negative");
  const PolyMesh& mesh = space.mesh();
  const std::size_t ne = space.num_elements();
  const std::size_t nf = mesh.num_faces();
  const std::size_t ld = space.local_dim();
  const std::size_t n = space.total_dofs();
  const std::size_t ns = space.scalar_dofs();
  const double adjoint = options.skip_adjoint_consistency ? 0.0 : 1.0;

  // Scalar blocks indexed by (test axis a, trial axis b): B1 = (0,0), B2 = (0,1), B3 = (1,1).
  constexpr std::array<std::array<std::size_t, 2>, 3> kBlocks{{{0, 0}, {0, 1}, {1, 1}}};

  std::vector<std::vector<Triplet>> tensor_parts(ne + nf);
  std::array<std::vector<std::vector<Triplet>>, 3> block_parts;
  for (auto& p : block_parts) p.resize(ne + nf);

  // Volume term (div sigma, div tau).
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ie = 0; ie < static_cast<std::ptrdiff_t>(ne); ++ie) {
    const auto e = static_cast<std::size_t>(ie);
    const auto rule = element_quadrature(mesh, e, space.assembly_degree());
    BasisSample s(ld);
    // grad_products[a][b](i, j) = sum_q w d_a phi_i d_b phi_j
    std::array<std::array<MatrixXd, 2>, 2> gp;
    for (auto& row : gp) {
      for (auto& m : row) m = MatrixXd::Zero(idx(ld), idx(ld));
    }
    for (std::size_t q = 0; q < rule.size(); ++q) {
      s.fill(space, e, rule.points[q]);
      for (std::size_t a = 0; a < 2; ++a) {
        const Eigen::Map<const Eigen::VectorXd> ga(s.grad[a].data(), idx(ld));
        for (std::size_t b = 0; b < 2; ++b) {
          const Eigen::Map<const Eigen::VectorXd> gb(s.grad[b].data(), idx(ld));
          gp[a][b].noalias() += rule.weights[q] * ga * gb.transpose();
        }
      }
    }
    // div(phi E_c) = d_{col c} phi e_{row c}
    MatrixXd local = MatrixXd::Zero(idx(kComponents * ld), idx(kComponents * ld));
    for (std::size_t c = 0; c < kComponents; ++c) {
      for (std::size_t d = 0; d < kComponents; ++d) {
        if (component_row(c) != component_row(d)) continue;
        local.block(idx(c * ld), idx(d * ld), idx(ld), idx(ld)) =
            gp[component_col(c)][component_col(d)];
      }
    }
    scatter_tensor(space, local, e, e, tensor_parts[e]);
    for (std::size_t k = 0; k < 3; ++k) {
      scatter_scalar(ld, gp[kBlocks[k][0]][kBlocks[k][1]], e, e, block_parts[k][e]);
    }
  }

  // Consistency and penalty terms on interior and Neumann faces.
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t jf = 0; jf < static_cast<std::ptrdiff_t>(nf); ++jf) {
    const auto f = static_cast<std::size_t>(jf);
    const Face& face = mesh.faces()[f];
    if (!carries_stiffness_terms(face)) continue;
    const double gamma = penalty(mesh, f, alpha, space.degree());
    const bool interior = face.minus.has_value();
    const double avg = interior ? 0.5 : 1.0;
    const std::size_t sides = interior ? 2 : 1;
    const std::array<std::size_t, 2> elem{face.plus, interior ? *face.minus : face.plus};
    const std::array<Point, 2> normal{face.normal, -1.0 * face.normal};
    const auto rule = face_quadrature(mesh, f, space.assembly_degree());

    std::array<std::array<MatrixXd, 2>, 2> tensor_local;
    std::array<std::array<std::array<MatrixXd, 2>, 2>, 3> block_local;
    for (std::size_t s = 0; s < 2; ++s) {
      for (std::size_t t = 0; t < 2; ++t) {
        tensor_local[s][t] = MatrixXd::Zero(idx(kComponents * ld), idx(kComponents * ld));
        for (auto& b : block_local) b[s][t] = MatrixXd::Zero(idx(ld), idx(ld));
      }
    }
    std::array<BasisSample, 2> sample{BasisSample(ld), BasisSample(ld)};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q];
      for (std::size_t s = 0; s < sides; ++s) sample[s].fill(space, elem[s], rule.points[q]);
      for (std::size_t s = 0; s < sides; ++s) {      // test side
        for (std::size_t t = 0; t < sides; ++t) {    // trial side
          const BasisSample& ts = sample[s];
          const BasisSample& tr = sample[t];
          // Scalar blocks: test axis a, trial axis b.
          for (std::size_t k = 0; k < 3; ++k) {
            const std::size_t a = kBlocks[k][0];
            const std::size_t b = kBlocks[k][1];
            const double na = component(normal[s], a);
            const double nb = component(normal[t], b);
            auto& m = block_local[k][s][t];
            for (std::size_t i = 0; i < ld; ++i) {
              for (std::size_t j = 0; j < ld; ++j) {
                m(idx(i), idx(j)) +=
                    w * (-avg * tr.grad[b][j] * ts.phi[i] * na -
                         adjoint * avg * ts.grad[a][i] * tr.phi[j] * nb +
                         gamma * tr.phi[j] * nb * ts.phi[i] * na);
              }
            }
          }
          // Tensor form with vector-valued traces:
          // [[phi E_c]] = phi n_{col c} e_{row c}, {div phi E_c} = avg d_{col c} phi e_{row c}.
          auto& m = tensor_local[s][t];
          for (std::size_t c = 0; c < kComponents; ++c) {
            for (std::size_t d = 0; d < kComponents; ++d) {
              if (component_row(c) != component_row(d)) continue;
              const std::size_t a = component_col(c);
              const std::size_t b = component_col(d);
              const double jump_test = component(normal[s], a);
              const double jump_trial = component(normal[t], b);
              for (std::size_t i = 0; i < ld; ++i) {
                for (std::size_t j = 0; j < ld; ++j) {
                  const double avg_div_trial = avg * tr.grad[b][j];
                  const double avg_div_test = avg * ts.grad[a][i];
                  const double jt = ts.phi[i] * jump_test;
                  const double js = tr.phi[j] * jump_trial;
                  m(idx(c * ld + i), idx(d * ld + j)) +=
                      w * (-avg_div_trial * jt - adjoint * avg_div_test * js + gamma * js * jt);
                }
              }
            }
          }
        }
      }
    }
    for (std::size_t s = 0; s < sides; ++s) {
      for (std::size_t t = 0; t < sides; ++t) {
        scatter_tensor(space, tensor_local[s][t], elem[s], elem[t], tensor_parts[ne + f]);
        for (std::size_t k = 0; k < 3; ++k) {
          scatter_scalar(ld, block_local[k][s][t], elem[s], elem[t], block_parts[k][ne + f]);
        }
      }
    }
  }

  StiffnessMatrices out;
  out.B1 = SparseMatrix::from_triplets(ns, ns, concatenate(block_parts[0]), kAssemblyDropTolerance);
  out.B2 = SparseMatrix::from_triplets(ns, ns, concatenate(block_parts[1]), kAssemblyDropTolerance);
  out.B3 = SparseMatrix::from_triplets(ns, ns, concatenate(block_parts[2]), kAssemblyDropTolerance);
  out.A = SparseMatrix::from_triplets(n, n, concatenate(tensor_parts), kAssemblyDropTolerance);
  return out;
}

SystemMatrices assemble_system(const DGSpace& space, double mu, double alpha) {
  auto mass = assemble_mass(space, mu);
  auto stiff = assemble_stiffness(space, alpha);
  SystemMatrices sys;
  sys.M1 = std::move(mass.M1);
  sys.K = mass.K;
  sys.M = std::move(mass.M);
  sys.B1 = std::move(stiff.B1);
  sys.B2 = std::move(stiff.B2);
  sys.B3 = std::move(stiff.B3);
  sys.A = std::move(stiff.A);
  sys.mu = mu;
  sys.alpha = alpha;
  return sys;
}

SparseMatrix build_system(const SparseMatrix& M, const SparseMatrix& A, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("time step must be positive (implicit Euler only)");
  }
  return add(M, 1.0, A, dt);
}

std::vector<double> assemble_load(const DGSpace& space, const ProblemData& data, double t,
                                  double alpha) {
  const PolyMesh& mesh = space.mesh();
  const std::size_t ld = space.local_dim();
  const int qdeg = space.assembly_degree() + 2;
  std::vector<double> f(space.total_dofs(), 0.0);
  BasisSample s(ld);

  if (data.source) {
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
      const auto rule = element_quadrature(mesh, e, qdeg);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        space.evaluate_basis(e, rule.points[q], s.phi);
        const Tensor src = data.source(rule.points[q], t);
        for (std::size_t c = 0; c < kComponents; ++c) {
          for (std::size_t i = 0; i < ld; ++i) {
            f[space.dof(c, e, i)] += rule.weights[q] * src[c] * s.phi[i];
          }
        }
      }
    }
  }

  for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& face = mesh.faces()[fi];
    if (!face.is_boundary()) continue;
    const bool neumann = face.kind == FaceKind::Neumann;
    if (neumann ? !data.neumann : !data.dirichlet) continue;
    const double gamma = neumann ? penalty(mesh, fi, alpha, space.degree()) : 0.0;
    const auto rule = face_quadrature(mesh, fi, qdeg);
    const std::size_t e = face.plus;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      s.fill(space, e, rule.points[q]);
      const Vec2 g = neumann ? data.neumann(rule.points[q], t, face.normal)
                             : data.dirichlet(rule.points[q], t);
      for (std::size_t c = 0; c < kComponents; ++c) {
        const double gk = component(g, component_row(c));
        const std::size_t a = component_col(c);
        const double na = component(face.normal, a);
        for (std::size_t i = 0; i < ld; ++i) {
          // Dirichlet: <g_D, tau n>; Neumann: <g_N, gamma tau n - div tau>.
          const double test = neumann ? gamma * s.phi[i] * na - s.grad[a][i] : s.phi[i] * na;
          f[space.dof(c, e, i)] += rule.weights[q] * gk * test;
        }
      }
    }
  }
  return f;
}

std::vector<double> assemble_rhs(const DGSpace& space, const SystemMatrices& system,
                                 const ProblemData& data, double t,
                                 std::span<const double> sigma_prev, double dt) {
  std::vector<double> rhs = system.M * sigma_prev;
  const auto load = assemble_load(space, data, t, system.alpha);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += dt * load[i];
  return rhs;
}

SparseMatrix stiffness_from_blocks(const SparseMatrix& B1, const SparseMatrix& B2,
                                   const SparseMatrix& B3) {
  const SparseMatrix B2t = B2.transpose();
  return block_matrix({{&B1, &B2, nullptr, nullptr},
                       {&B2t, &B3, nullptr, nullptr},
                       {nullptr, nullptr, &B1, &B2},
                       {nullptr, nullptr, &B2t, &B3}});
}

StructureDeviation kron_structure_check(const SystemMatrices& system) {
  StructureDeviation dev;
  dev.mass = max_abs_difference(system.M, kronecker(system.K, system.M1));
  dev.stiffness =
      max_abs_difference(system.A, stiffness_from_blocks(system.B1, system.B2, system.B3));
  return dev;
}

}  // namespace psdg
