#include "psdg/timestepper.hpp"

#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <sstream>

#include "psdg/quadrature.hpp"

namespace psdg {

TimeConfig TimeConfig::make(double dt, double final_time) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (!(final_time >= 0.0)) throw std::invalid_argument("final time must be nonnegative");
  TimeConfig tc;
  tc.dt = dt;
  tc.final_time = final_time;
  tc.steps = static_cast<std::size_t>(std::llround(final_time / dt));
  const double reached = static_cast<double>(tc.steps) * dt;
  if (std::abs(reached - final_time) > 1e-12 * std::max(final_time, dt)) {
    throw std::invalid_argument(
        fmt::format("final time {} is not a multiple of dt = {}", final_time, dt));
  }
  return tc;
}

SolverKind parse_solver(const std::string& name) {
  if (name == "cg") return SolverKind::Cg;
  if (name == "dcg") return SolverKind::DeflatedCg;
  if (name == "pcg-bj") return SolverKind::PcgBlockJacobi;
  if (name == "pcg-cbj") return SolverKind::PcgCollectiveBlockJacobi;
  if (name == "direct") return SolverKind::Direct;
  throw std::invalid_argument("unknown solver '" + name + "'");
}

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::Cg: return "cg";
    case SolverKind::DeflatedCg: return "dcg";
    case SolverKind::PcgBlockJacobi: return "pcg-bj";
    case SolverKind::PcgCollectiveBlockJacobi: return "pcg-cbj";
    case SolverKind::Direct: return "direct";
  }
  return "?";
}

LinearSolver::LinearSolver(SparseMatrix system, const DofLayout& layout, SolverKind kind,
                           const SolverConfig& config)
    : system_(std::make_unique<SparseMatrix>(std::move(system))), kind_(kind), config_(config) {
  config_.validate();
  switch (kind_) {
    case SolverKind::Cg:
      break;
    case SolverKind::DeflatedCg:
      deflator_ = std::make_unique<Deflator>(*system_, layout.scalar_dofs());
      break;
    case SolverKind::PcgBlockJacobi:
      preconditioner_ =
          std::make_unique<BlockJacobi>(*system_, layout, BlockLayout::ComponentWise);
      break;
    case SolverKind::PcgCollectiveBlockJacobi:
      preconditioner_ = std::make_unique<BlockJacobi>(*system_, layout, BlockLayout::Collective);
      break;
    case SolverKind::Direct:
      factor_ = std::make_unique<SparseCholesky>(*system_);
      break;
  }
}

SolveResult LinearSolver::solve(std::span<const double> b) const {
  switch (kind_) {
    case SolverKind::Cg:
      return cg(as_operator(*system_), b, config_);
    case SolverKind::DeflatedCg:
      return deflated_cg(*deflator_, b, config_);
    case SolverKind::PcgBlockJacobi:
    case SolverKind::PcgCollectiveBlockJacobi: {
      const BlockJacobi* bj = preconditioner_.get();
      return pcg(as_operator(*system_), b,
                 [bj](std::span<const double> r, std::span<double> z) { bj->apply(r, z); },
                 config_);
    }
    case SolverKind::Direct: {
      const auto start = std::chrono::steady_clock::now();
      SolveResult out;
      out.x = factor_->solve(b);
      std::vector<double> res = *system_ * out.x;
      for (std::size_t i = 0; i < res.size(); ++i) res[i] = b[i] - res[i];
      const double bnorm = norm2(b);
      out.report.relative_residual = bnorm > 0.0 ? norm2(res) / bnorm : 0.0;
      out.report.converged = true;
      out.report.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return out;
    }
  }
  throw std::logic_error("unhandled solver kind");
}

NonConvergence::NonConvergence(std::size_t step, const SolverReport& report)
    : std::runtime_error(fmt::format("solver did not converge at step {} ({} iterations, "
                                     "relative residual {:.3e})",
                                     step, report.iterations, report.relative_residual)),
      step_(step),
      report_(report) {}

RunResult implicit_euler_run(const DGSpace& space, const SystemMatrices& system,
                             const ProblemData& data, const TimeConfig& time, SolverKind solver,
                             const SolverConfig& config) {
  const DofLayout layout{space.num_elements(), space.local_dim()};
  const LinearSolver linear(build_system(system.M, system.A, time.dt), layout, solver, config);
  RunResult run;
  run.sigma = data.initial ? l2_project(space, data.initial)
                           : std::vector<double>(space.total_dofs(), 0.0);
  for (std::size_t n = 1; n <= time.steps; ++n) {
    const double t = time.time(n);
    const auto rhs = assemble_rhs(space, system, data, t, run.sigma, time.dt);
    auto result = linear.solve(rhs);
    if (!result.report.converged) throw NonConvergence(n, result.report);
    run.sigma = std::move(result.x);
    run.steps.push_back({n, t, std::move(result.report)});
  }
  return run;
}

std::string step_log_csv(const RunResult& run) {
  std::ostringstream out;
  out << "step,time,iterations,residual\n";
  for (const auto& s : run.steps) {
    out << fmt::format("{},{:.12g},{},{:.6e}\n", s.step, s.time, s.report.iterations,
                       s.report.relative_residual);
  }
  return out.str();
}

namespace {

struct ErrorSource {
  std::function<Tensor(Point)> value;
  std::function<Vec2(Point)> divergence;
};

double energy_core(const DGSpace& space, std::span<const double> dofs, const ErrorSource& exact,
                   double alpha, double mu) {
  const PolyMesh& mesh = space.mesh();
  const int qdeg = space.assembly_degree() + 2;
  const auto sample = [&](std::size_t e, Point x) {
    Tensor v = evaluate_field(space, dofs, e, x);
    if (exact.value) {
      const Tensor s = exact.value(x);
      for (std::size_t c = 0; c < kComponents; ++c) v[c] -= s[c];
    }
    return v;
  };

  double volume = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto rule = element_quadrature(mesh, e, qdeg);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = rule.points[q];
      const Tensor d = deviator(sample(e, x));
      Vec2 div = evaluate_divergence(space, dofs, e, x);
      if (exact.divergence) div = div - exact.divergence(x);
      double dev2 = 0.0;
      for (double v : d) dev2 += v * v;
      volume += rule.weights[q] * (dev2 / mu + dot(div, div));
    }
  }

  double jumps = 0.0;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.faces()[f];
    if (face.kind == FaceKind::Dirichlet) continue;
    const double gamma = penalty(mesh, f, alpha, space.degree());
    const auto rule = face_quadrature(mesh, f, qdeg);
    const Point n = face.normal;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = rule.points[q];
      Tensor t = sample(face.plus, x);
      if (face.minus) {
        const Tensor m = sample(*face.minus, x);
        for (std::size_t c = 0; c < kComponents; ++c) t[c] -= m[c];
      }
      const Vec2 jump{t[0] * n.x + t[1] * n.y, t[2] * n.x + t[3] * n.y};
      jumps += rule.weights[q] * gamma * dot(jump, jump);
    }
  }
  return std::sqrt(volume + jumps);
}

}  // namespace

double energy_norm(const DGSpace& space, std::span<const double> dofs, double alpha, double mu) {
  return energy_core(space, dofs, {}, alpha, mu);
}

double energy_error(const DGSpace& space, std::span<const double> dofs, const ExactField& exact,
                    double t, double alpha, double mu) {
  ErrorSource src;
  src.value = [&exact, t](Point x) { return exact.value(x, t); };
  src.divergence = [&exact, t](Point x) { return exact.divergence(x, t); };
  return energy_core(space, dofs, src, alpha, mu);
}

}  // namespace psdg
