// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "psdg/assembly.hpp"
#include "psdg/bench.hpp"
#include "psdg/deflation.hpp"
#include "psdg/timestepper.hpp"

using namespace psdg;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Case {
  PolyMesh mesh;
  std::string name;
};

std::vector<Case> test_meshes() {
  std::vector<Case> out;
  for (const char* spec : {"cartesian:2x2", "cartesian:5x3", "agglomerated:8x8/12",
                           "agglomerated:16x16/60"}) {
    out.push_back({build_mesh(MeshSpec::parse(spec), 7, "right"), spec});
  }
  return out;
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  auto v = random_sigma(n, seed, 0);
  for (double& x : v) x = 2.0 * x - 1.0;
  return v;
}

Outcome structural_identity() {
  double worst_m = 0.0, worst_a = 0.0;
  for (const auto& c : test_meshes()) {
    for (int p = 1; p <= 3; ++p) {
      const DGSpace s(std::make_shared<PolyMesh>(c.mesh), p);
      const auto sys = assemble_system(s);
      const auto dev = kron_structure_check(sys);
      worst_m = std::max(worst_m, dev.mass / sys.M.max_abs());
      worst_a = std::max(worst_a, dev.stiffness / sys.A.max_abs());
    }
  }
  return {worst_m <= 1e-12 && worst_a <= 1e-12,
          fmt::format("max scaled deviation M {:.2e}, A {:.2e} (limit 1e-12)", worst_m, worst_a)};
}

Outcome coarse_identity() {
  double worst = 0.0;
  for (const auto& c : test_meshes()) {
    for (int p = 1; p <= 3; ++p) {
      const DGSpace s(std::make_shared<PolyMesh>(c.mesh), p);
      const auto sys = assemble_system(s, 1.0);
      for (double dt : {1.0, 1e-4, 1e-8}) {
        const auto star = build_system(sys.M, sys.A, dt);
        const Deflator d(star, s.scalar_dofs());
        const auto expected = add(sys.B1, 0.5 * dt, sys.B3, 0.5 * dt);
        worst = std::max(worst, max_abs_difference(d.coarse_matrix(), expected) /
                                    std::max(1.0, expected.max_abs()));
      }
    }
  }
  return {worst <= 1e-12, fmt::format("max |W - dt/2 (B1+B3)| {:.2e} (limit 1e-12)", worst)};
}

ExperimentConfig bench_config() {
  ExperimentConfig c;
  c.degree = 3;
  c.tol = 1e-8;
  c.repetitions = 10;
  c.seed = 1;
  return c;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return (*hi - *lo) / *lo;
}

Outcome conditioning() {
  auto c = bench_config();
  c.meshes = {"agglomerated:20x20/100"};
  c.dts = {1e-8, 1e-9, 1e-10};
  c.condition_method = ConditionMethod::Lanczos;
  c.condition_preconditioner = "pcg-cbj";
  const auto t = run_condition_table(c);
  std::vector<double> raw, prec;
  for (std::size_t d = 0; d < c.dts.size(); ++d) {
    raw.push_back(t.at(d, 0).raw.condition);
    prec.push_back(t.at(d, 0).preconditioned.condition);
  }
  const double r1 = raw[1] / raw[0], r2 = raw[2] / raw[1];
  const double var = spread(prec);
  const bool ok = t.all_converged() && r1 >= 8 && r1 <= 12 && r2 >= 8 && r2 <= 12 && var <= 0.05;
  return {ok, fmt::format("kappa(A*) {:.3e} {:.3e} {:.3e}, ratios {:.2f} {:.2f} (want [8,12]); "
                          "cbj kappa {:.2f} {:.2f} {:.2f}, spread {:.1f}% (limit 5%){}",
                          raw[0], raw[1], raw[2], r1, r2, prec[0], prec[1], prec[2], 100 * var,
                          t.all_converged() ? "" : "; Lanczos not converged")};
}

const std::vector<std::string> kIterationMeshes = {"agglomerated:10x10/50",
                                                   "agglomerated:20x20/100"};

Outcome deflation_robustness() {
  auto c = bench_config();
  c.meshes = kIterationMeshes;
  c.dts = {1e-7, 1e-8};
  c.solvers = {SolverKind::Cg, SolverKind::DeflatedCg};
  const auto t = run_iteration_table(c);
  bool ok = t.all_converged();
  std::string detail;
  for (std::size_t m = 0; m < c.meshes.size(); ++m) {
    const double d0 = t.at(SolverKind::DeflatedCg, 0, m).mean();
    const double d1 = t.at(SolverKind::DeflatedCg, 1, m).mean();
    const double c0 = t.at(SolverKind::Cg, 0, m).mean();
    const double c1 = t.at(SolverKind::Cg, 1, m).mean();
    const double dvar = std::abs(d1 - d0) / std::min(d0, d1);
    const double cgrowth = (c1 - c0) / c0;
    ok = ok && dvar <= 0.10 && cgrowth >= 0.50;
    detail += fmt::format("{}{}: dcg {:.1f} -> {:.1f} ({:.0f}%, limit 10%), cg {:.1f} -> {:.1f} "
                          "({:+.0f}%, want >= +50%)",
                          m ? "; " : "", c.meshes[m], d0, d1, 100 * dvar, c0, c1, 100 * cgrowth);
  }
  return {ok, detail};
}

Outcome block_jacobi_robustness() {
  auto c = bench_config();
  c.meshes = kIterationMeshes;
  c.dts = {1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10};
  c.solvers = {SolverKind::PcgBlockJacobi, SolverKind::PcgCollectiveBlockJacobi};
  const auto t = run_iteration_table(c);
  bool ok = t.all_converged();
  std::string detail;
  for (std::size_t m = 0; m < c.meshes.size(); ++m) {
    std::vector<double> cbj;
    for (std::size_t d = 1; d < c.dts.size(); ++d) {
      cbj.push_back(t.at(SolverKind::PcgCollectiveBlockJacobi, d, m).mean());
    }
    const double b0 = t.at(SolverKind::PcgBlockJacobi, 0, m).mean();
    const double b2 = t.at(SolverKind::PcgBlockJacobi, 2, m).mean();
    const double var = spread(cbj);
    const double growth = (b2 - b0) / b0;
    ok = ok && var <= 0.10 && growth >= 1.0;
    const auto [lo, hi] = std::minmax_element(cbj.begin(), cbj.end());
    detail += fmt::format("{}{}: cbj {:.1f}..{:.1f} ({:.0f}%, limit 10%), bj {:.1f} -> {:.1f} "
                          "({:+.0f}%, want >= +100%)",
                          m ? "; " : "", c.meshes[m], *lo, *hi, 100 * var, b0, b2, 100 * growth);
  }
  return {ok, detail};
}

Outcome oracle_equivalence() {
  double worst = 0.0;
  bool converged = true;
  std::size_t solves = 0;
  for (const char* spec : {"cartesian:2x2", "cartesian:4x4", "agglomerated:8x8/10"}) {
    const DGSpace s(std::make_shared<PolyMesh>(build_mesh(MeshSpec::parse(spec), 7, "right")), 1);
    const auto sys = assemble_system(s);
    // Below 1e-6 the dense oracle itself carries kappa * eps > 1e-7 error.
    for (double dt : {1e-2, 1e-4, 1e-6}) {
      const auto star = build_system(sys.M, sys.A, dt);
      const Eigen::MatrixXd dense = star.to_dense();
      const Eigen::LDLT<Eigen::MatrixXd> oracle(dense);
      SolverConfig cfg;
      cfg.tol = 1e-10;
      for (SolverKind k : {SolverKind::Cg, SolverKind::DeflatedCg, SolverKind::PcgBlockJacobi,
                           SolverKind::PcgCollectiveBlockJacobi}) {
        const LinearSolver solver(star, {s.num_elements(), s.local_dim()}, k, cfg);
        for (std::uint64_t r = 0; r < 5; ++r) {
          const auto b = random_vector(star.rows(), 100 + r);
          const auto got = solver.solve(b);
          converged = converged && got.report.converged;
          const Eigen::VectorXd want =
              oracle.solve(Eigen::Map<const Eigen::VectorXd>(b.data(), std::ssize(b)));
          const Eigen::Map<const Eigen::VectorXd> x(got.x.data(), std::ssize(got.x));
          worst = std::max(worst, (x - want).norm() / want.norm());
          ++solves;
        }
      }
    }
  }
  return {converged && worst <= 1e-7,
          fmt::format("{} solves, max relative error vs dense {:.2e} (limit 1e-7)", solves, worst)};
}

Outcome deflation_algebra() {
  double idem = 0.0, ortho = 0.0, psd = 0.0;
  for (const char* spec : {"cartesian:4x4", "agglomerated:12x12/30"}) {
    const DGSpace s(std::make_shared<PolyMesh>(build_mesh(MeshSpec::parse(spec), 7, "right")), 2);
    const auto sys = assemble_system(s);
    for (double dt : {1e-3, 1e-8}) {
      const auto star = build_system(sys.M, sys.A, dt);
      const Deflator d(star, s.scalar_dofs());
      const std::size_t n = star.rows();
      std::vector<double> pu(n), ppu(n), pv(n), piu(n), apv(n), au(n), du(n);
      for (std::uint64_t r = 0; r < 100; ++r) {
        const auto u = random_vector(n, 1000 + r);
        const auto v = random_vector(n, 5000 + r);
        d.project(u, pu);
        d.project(pu, ppu);
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          diff = std::max(diff, std::abs(ppu[i] - pu[i]));
          piu[i] = u[i] - pu[i];
        }
        const double umax = std::abs(*std::max_element(
            u.begin(), u.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }));
        idem = std::max(idem, diff / umax);
        // pi u and (I - pi) v are A*-orthogonal.
        d.project(v, pv);
        star.multiply(pv, apv);
        star.multiply(u, au);
        const auto av = star * std::span<const double>(v);
        ortho = std::max(ortho, std::abs(dot(piu, apv)) /
                                    std::sqrt(dot(u, au) * dot(v, av)));
        // A*(I - pi) is positive semi-definite.
        d.apply_deflated(u, du);
        psd = std::max(psd, -dot(u, du) / dot(u, au));
      }
    }
  }
  return {idem <= 1e-10 && ortho <= 1e-10 && psd <= 1e-10,
          fmt::format("idempotence {:.2e}, A*-orthogonality {:.2e}, negativity {:.2e} "
                      "(limit 1e-10 each)",
                      idem, ortho, std::max(psd, 0.0))};
}

Outcome discretisation_consistency() {
  bool ok = true;
  std::string detail;
  for (int p : {1, 2}) {
    ExperimentConfig c;
    // 4x4 is still pre-asymptotic for the trigonometric field.
    c.meshes = {"cartesian:8x8", "cartesian:16x16", "cartesian:32x32"};
    c.degree = p;
    c.dts = {1e-8};
    c.steps = 4;
    c.study = "space";
    c.field = "trig";
    c.solver = SolverKind::Direct;
    const auto t = run_convergence(c);
    double lo = INFINITY;
    for (std::size_t i = 1; i < t.rows.size(); ++i) lo = std::min(lo, t.rows[i].slope);
    ok = ok && lo >= p - 0.2;
    detail += fmt::format("space p={} min slope {:.2f} (want >= {:.1f}); ", p, lo, p - 0.2);
  }
  ExperimentConfig c;
  c.meshes = {"cartesian:4x4"};
  c.degree = 2;
  c.dts = {0.1, 0.05, 0.025, 0.0125};
  c.final_time = 1.0;
  c.study = "time";
  c.field = "poly";
  c.solver = SolverKind::Direct;
  const auto t = run_convergence(c);
  double lo = INFINITY;
  for (std::size_t i = 1; i < t.rows.size(); ++i) lo = std::min(lo, t.rows[i].slope);
  ok = ok && lo >= 0.9;
  detail += fmt::format("time min slope {:.2f} (want >= 0.9)", lo);
  return {ok, detail};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
#ifdef PSDG_CLI_PATH
  const auto dir = std::filesystem::temp_directory_path() / "psdg_acceptance";
  std::filesystem::create_directories(dir);
  std::vector<std::string> csv;
  for (int run = 0; run < 2; ++run) {
    const auto prefix = (dir / fmt::format("run{}", run)).string();
    const std::string cmd = fmt::format(
        "\"{}\" iter-table --mesh cartesian:3x3,agglomerated:10x10/20 --degree 2 "
        "--dt 1e-4,1e-7 --solvers cg,dcg,pcg-bj,pcg-cbj --reps 4 --seed 5 --output \"{}\" "
        "> /dev/null",
        PSDG_CLI_PATH, prefix);
    if (std::system(cmd.c_str()) != 0) return {false, "iter-table exited nonzero"};
    csv.push_back(slurp(prefix + ".csv"));
  }
  std::filesystem::remove_all(dir);
  const bool same = !csv[0].empty() && csv[0] == csv[1];
  return {same, fmt::format("two iter-table runs, {} bytes, {}", csv[0].size(),
                            same ? "identical" : "differ")};
#else
  return {false, "CLI path not configured"};
#endif
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"structural identity", structural_identity},
      {"coarse operator identity", coarse_identity},
      {"conditioning scaling", conditioning},
      {"deflated CG dt-robustness", deflation_robustness},
      {"collective block Jacobi dt-robustness", block_jacobi_robustness},
      {"oracle equivalence", oracle_equivalence},
      {"deflation algebra", deflation_algebra},
      {"discretisation consistency", discretisation_consistency},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fmt::print("{} {}. {}: {} [{:.1f}s]\n", out.pass ? "PASS" : "FAIL", i + 1,
               criteria[i].first, out.detail, secs);
    std::fflush(stdout);
    failed += out.pass ? 0 : 1;
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
