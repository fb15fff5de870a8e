#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "psdg/lanczos.hpp"
#include "psdg/mesh.hpp"
#include "psdg/timestepper.hpp"

namespace psdg {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mesh specification strings:
///   cartesian:NXxNY
///   agglomerated:NXxNY/TARGET   (Cartesian grid merged down to TARGET elements)
///   file:PATH
struct MeshSpec {
  enum class Kind { Cartesian, Agglomerated, File };
  Kind kind = Kind::Cartesian;
  int nx = 1;
  int ny = 1;
  std::size_t target = 0;
  std::string path;

  static MeshSpec parse(const std::string& text);
  std::string str() const;
};

/// Unit-square mesh for the spec with the named Neumann boundary applied
/// (file meshes keep their own tags when `neumann` is empty).
PolyMesh build_mesh(const MeshSpec& spec, std::uint64_t seed, const std::string& neumann);

struct ExperimentConfig {
  std::vector<std::string> meshes{"agglomerated:10x10/50"};
  std::uint64_t mesh_seed = 7;
  std::string neumann = "right";
  int degree = 3;
  double alpha = 10.0;
  double mu = 1.0;
  std::vector<double> dts{1e-6, 1e-7, 1e-8};
  std::vector<SolverKind> solvers{SolverKind::Cg, SolverKind::DeflatedCg};
  double tol = 1e-8;
  std::size_t maxit = 100000;
  std::size_t repetitions = 10;
  std::uint64_t seed = 1;
  std::string output;

  // condition table
  double lanczos_tol = 1e-6;
  std::size_t lanczos_maxit = 400;
  ConditionMethod condition_method = ConditionMethod::Auto;
  std::size_t dense_limit = 2000;
  std::string condition_preconditioner = "pcg-cbj";  ///< "pcg-cbj", "pcg-bj" or "none"

  // convergence study and solve
  std::string study = "space";  ///< "space" or "time"
  std::string field = "trig";   ///< "trig" or "poly"
  std::size_t steps = 4;        ///< space study: steps at dts[0]
  double final_time = 1.0;      ///< time study and solve
  SolverKind solver = SolverKind::Direct;  ///< convergence and solve runs

  /// Throws ConfigError.
  void validate() const;
  /// Canonical key=value listing of every setting (fixed order).
  std::string canonical() const;
  /// FNV-1a of canonical().
  std::uint64_t hash() const;
};

/// Sets `section.key` from its textual value; throws ConfigError on an unknown
/// key or a malformed value.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);
/// Plain-text config: [section] headers and key=value lines, # or ; comments.
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});

std::uint64_t fnv1a(const std::string& text);

/// Cells where dt and h^p lie within one order of magnitude.
bool balanced(double dt, double h, int degree);

struct MeshInfo {
  std::string spec;
  std::size_t elements = 0;
  double h = 0.0;
  std::size_t dofs = 0;
};

/// f* = M sigma_rand + dt F with sigma_rand uniform on [0, 1), drawn from a
/// generator seeded with (seed, repetition).
std::vector<double> random_sigma(std::size_t n, std::uint64_t seed, std::size_t repetition);

struct IterationCell {
  SolverKind solver = SolverKind::Cg;
  std::size_t dt_index = 0;
  std::size_t mesh_index = 0;
  double dt = 0.0;
  std::vector<std::size_t> iterations;
  std::size_t failures = 0;
  bool balanced = false;

  double mean() const;
};

struct IterationTable {
  ExperimentConfig config;
  std::vector<MeshInfo> meshes;
  std::vector<IterationCell> cells;

  const IterationCell& at(SolverKind solver, std::size_t dt_index, std::size_t mesh_index) const;
  bool all_converged() const;
};

/// Non-converged solves count as maxit and are flagged, not thrown.
IterationTable run_iteration_table(const ExperimentConfig& config);

struct ConditionCell {
  std::size_t dt_index = 0;
  std::size_t mesh_index = 0;
  double dt = 0.0;
  ConditionEstimate raw;
  ConditionEstimate preconditioned;
  bool balanced = false;
};

struct ConditionTable {
  ExperimentConfig config;
  std::vector<MeshInfo> meshes;
  std::vector<ConditionCell> cells;

  const ConditionCell& at(std::size_t dt_index, std::size_t mesh_index) const;
  bool all_converged() const;
};

ConditionTable run_condition_table(const ExperimentConfig& config);

struct ConvergenceRow {
  MeshInfo mesh;
  double dt = 0.0;
  double error = 0.0;
  /// log(e_prev / e) / log(x_prev / x) for x = h or dt; NaN on the first row.
  double slope = 0.0;
};

struct ConvergenceTable {
  ExperimentConfig config;
  std::vector<ConvergenceRow> rows;
};

/// "space": every mesh in turn at dts[0] for `steps` steps.
/// "time": the first mesh for every dt up to final_time.
ConvergenceTable run_convergence(const ExperimentConfig& config);

/// Exact field selected by config.field.
ExactField experiment_field(const ExperimentConfig& config);

std::string to_csv(const IterationTable& table);
std::string to_markdown(const IterationTable& table);
std::string to_csv(const ConditionTable& table);
std::string to_markdown(const ConditionTable& table);
std::string to_csv(const ConvergenceTable& table);
std::string to_markdown(const ConvergenceTable& table);

/// Comment lines carrying the config hash, seed and tolerances.
std::string table_header(const ExperimentConfig& config, const std::string& kind,
                         const std::string& prefix);

}  // namespace psdg
