// psdg: benchmark harness for the pseudo-stress PolyDG solvers.
#include <CLI11.hpp>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <iostream>

#include "psdg/bench.hpp"
#include "psdg/matrix_market.hpp"

namespace fs = std::filesystem;
using namespace psdg;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNotConverged = 2;

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

constexpr Flag kFlags[] = {
    {"--mesh", "mesh.specs", "comma-separated mesh specs"},
    {"--mesh-seed", "mesh.seed", "agglomeration seed"},
    {"--neumann", "mesh.neumann", "Neumann boundary: none|all|right|left|top|bottom|left-right"},
    {"--degree", "discretisation.degree", "polynomial degree p"},
    {"--alpha", "discretisation.alpha", "penalty coefficient"},
    {"--mu", "discretisation.mu", "viscosity"},
    {"--dt", "experiment.dt", "comma-separated time steps"},
    {"--solvers", "experiment.solvers", "comma-separated: cg,dcg,pcg-bj,pcg-cbj"},
    {"--reps", "experiment.repetitions", "random right-hand sides per cell"},
    {"--seed", "experiment.seed", "rng seed"},
    {"--tol", "solver.tol", "relative residual tolerance"},
    {"--maxit", "solver.maxit", "iteration cap"},
    {"--lanczos-tol", "condition.tol", "Ritz residual tolerance"},
    {"--lanczos-maxit", "condition.maxit", "Lanczos iteration cap"},
    {"--method", "condition.method", "auto|lanczos|dense"},
    {"--preconditioner", "condition.preconditioner", "none|pcg-bj|pcg-cbj"},
    {"--study", "convergence.study", "space|time"},
    {"--field", "convergence.field", "trig|poly"},
    {"--steps", "convergence.steps", "time steps per run (space study)"},
    {"--final-time", "convergence.final_time", "final time (time study, solve)"},
    {"--solver", "convergence.solver", "solver for time stepping runs"},
    {"--output", "output.path", "output prefix (tables) or directory (export)"},
};

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

template <class Table>
int emit(const Table& table, bool ok) {
  const std::string md = to_markdown(table);
  std::cout << md;
  if (!table.config.output.empty()) {
    write_file(table.config.output + ".csv", to_csv(table));
    write_file(table.config.output + ".md", md);
  }
  if (!ok) std::cerr << "warning: flagged non-convergence\n";
  return ok ? kOk : kNotConverged;
}

int run_solve(const ExperimentConfig& config) {
  const ExactField exact = experiment_field(config);
  const auto data = manufactured_problem(exact, config.mu);
  auto mesh = std::make_shared<const PolyMesh>(
      build_mesh(MeshSpec::parse(config.meshes.front()), config.mesh_seed, config.neumann));
  const DGSpace space(mesh, config.degree);
  const auto system = assemble_system(space, config.mu, config.alpha);
  const auto time = TimeConfig::make(config.dts.front(), config.final_time);
  const SolverConfig solver_config{config.tol, config.maxit, true};
  try {
    const auto run = implicit_euler_run(space, system, data, time, config.solver, solver_config);
    const double error = energy_error(space, run.sigma, exact, time.final_time, config.alpha,
                                      config.mu);
    std::cout << table_header(config, "solve", "# ");
    std::cout << fmt::format("elements={} dofs={} h={:.6g} dt={:g} steps={} solver={}\n",
                             space.num_elements(), space.total_dofs(), mesh->mesh_size(),
                             time.dt, time.steps, solver_name(config.solver));
    std::cout << fmt::format("energy_error={:.6e}\n", error);
    if (!config.output.empty()) {
      write_file(config.output + ".steps.csv", step_log_csv(run));
      if (!run.steps.empty()) {
        write_file(config.output + ".history.csv", history_csv(run.steps.back().report));
      }
    }
    return kOk;
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNotConverged;
  }
}

int run_export(const ExperimentConfig& config) {
  if (config.output.empty()) throw ConfigError("export-matrices needs --output DIR");
  auto mesh = std::make_shared<const PolyMesh>(
      build_mesh(MeshSpec::parse(config.meshes.front()), config.mesh_seed, config.neumann));
  const DGSpace space(mesh, config.degree);
  const auto sys = assemble_system(space, config.mu, config.alpha);
  const double dt = config.dts.front();
  const fs::path dir(config.output);
  fs::create_directories(dir);
  const std::string note = fmt::format("config_hash={:016x} dt={:g}", config.hash(), dt);
  write_matrix_market_file((dir / "M1.mtx").string(), sys.M1, note);
  write_matrix_market_file((dir / "B1.mtx").string(), sys.B1, note);
  write_matrix_market_file((dir / "B2.mtx").string(), sys.B2, note);
  write_matrix_market_file((dir / "B3.mtx").string(), sys.B3, note);
  write_matrix_market_file((dir / "M.mtx").string(), sys.M, note);
  write_matrix_market_file((dir / "A.mtx").string(), sys.A, note);
  write_matrix_market_file((dir / "Astar.mtx").string(), build_system(sys.M, sys.A, dt), note);
  std::ofstream mesh_out(dir / "mesh.txt");
  write_mesh(mesh_out, *mesh);
  std::cout << fmt::format("wrote M1, B1, B2, B3, M, A, Astar ({} dofs) to {}\n",
                           space.total_dofs(), dir.string());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-stress PolyDG solver benchmarks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> sets;
  app.add_option("-c,--config", config_path, "config file ([section] key=value)");
  app.add_option("--set", sets, "override: section.key=value (repeatable)");
  std::vector<std::string> values(std::size(kFlags));
  std::vector<CLI::Option*> options;
  for (std::size_t i = 0; i < std::size(kFlags); ++i) {
    options.push_back(app.add_option(kFlags[i].name, values[i], kFlags[i].help));
  }

  auto* cond = app.add_subcommand("cond-table", "condition numbers of A* (raw and preconditioned)");
  auto* iter = app.add_subcommand("iter-table", "mean solver iteration counts");
  auto* conv = app.add_subcommand("convergence", "manufactured-solution convergence study");
  auto* solve = app.add_subcommand("solve", "implicit Euler run with per-step log");
  auto* exp = app.add_subcommand("export-matrices", "write operators in Matrix Market format");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  ExperimentConfig config;
  try {
    if (!config_path.empty()) config = load_config(config_path);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects section.key=value");
      apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
    }
    for (std::size_t i = 0; i < options.size(); ++i) {
      if (options[i]->count()) apply_setting(config, kFlags[i].key, values[i]);
    }
    config.validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (cond->parsed()) {
      const auto table = run_condition_table(config);
      return emit(table, table.all_converged());
    }
    if (iter->parsed()) {
      const auto table = run_iteration_table(config);
      return emit(table, table.all_converged());
    }
    if (conv->parsed()) return emit(run_convergence(config), true);
    if (solve->parsed()) return run_solve(config);
    if (exp->parsed()) return run_export(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
