#include "psdg/bench.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "psdg/assembly.hpp"

namespace psdg {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(fmt::format("{}: cannot parse '{}'", key, text));
  }
  return value;
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

template <class T, class F>
std::string join(const std::vector<T>& items, F&& f) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += f(items[i]);
  }
  return out;
}

std::string method_name(ConditionMethod m) {
  switch (m) {
    case ConditionMethod::Auto: return "auto";
    case ConditionMethod::Lanczos: return "lanczos";
    case ConditionMethod::Dense: return "dense";
  }
  return "?";
}

MeshInfo describe(const std::string& spec, const DGSpace& space) {
  return {spec, space.num_elements(), space.mesh().mesh_size(), space.total_dofs()};
}

std::string mesh_label(const MeshInfo& m) {
  return fmt::format("{} ({} el, h={:.3g})", m.spec, m.elements, m.h);
}

std::string markdown_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out + "\n";
}

std::string markdown_rule(std::size_t columns) {
  std::string out = "|";
  for (std::size_t i = 0; i < columns; ++i) out += i == 0 ? " :--- |" : " ---: |";
  return out + "\n";
}

struct Discretisation {
  std::shared_ptr<const PolyMesh> mesh;
  std::unique_ptr<DGSpace> space;
  SystemMatrices system;
};

Discretisation discretise(const ExperimentConfig& config, const std::string& spec) {
  Discretisation d;
  d.mesh = std::make_shared<const PolyMesh>(
      build_mesh(MeshSpec::parse(spec), config.mesh_seed, config.neumann));
  d.space = std::make_unique<DGSpace>(d.mesh, config.degree);
  d.system = assemble_system(*d.space, config.mu, config.alpha);
  return d;
}

}  // namespace

MeshSpec MeshSpec::parse(const std::string& text) {
  MeshSpec spec;
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("mesh spec '" + text + "' lacks a kind");
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  auto parse_dims = [&](const std::string& dims) {
    const auto x = dims.find('x');
    if (x == std::string::npos) throw ConfigError("mesh spec '" + text + "': expected NXxNY");
    spec.nx = parse_number<int>("mesh", dims.substr(0, x));
    spec.ny = parse_number<int>("mesh", dims.substr(x + 1));
    if (spec.nx < 1 || spec.ny < 1) throw ConfigError("mesh spec '" + text + "': empty grid");
  };
  if (kind == "cartesian") {
    spec.kind = Kind::Cartesian;
    parse_dims(rest);
  } else if (kind == "agglomerated") {
    spec.kind = Kind::Agglomerated;
    const auto slash = rest.find('/');
    if (slash == std::string::npos) {
      throw ConfigError("mesh spec '" + text + "': expected NXxNY/TARGET");
    }
    parse_dims(rest.substr(0, slash));
    spec.target = parse_number<std::size_t>("mesh", rest.substr(slash + 1));
    if (spec.target < 1 || spec.target > static_cast<std::size_t>(spec.nx * spec.ny)) {
      throw ConfigError("mesh spec '" + text + "': target out of range");
    }
  } else if (kind == "file") {
    spec.kind = Kind::File;
    spec.path = rest;
    if (!std::ifstream(spec.path)) throw ConfigError("mesh file '" + spec.path + "' not found");
  } else {
    throw ConfigError("unknown mesh kind '" + kind + "'");
  }
  return spec;
}

std::string MeshSpec::str() const {
  switch (kind) {
    case Kind::Cartesian: return fmt::format("cartesian:{}x{}", nx, ny);
    case Kind::Agglomerated: return fmt::format("agglomerated:{}x{}/{}", nx, ny, target);
    case Kind::File: return "file:" + path;
  }
  return {};
}

PolyMesh build_mesh(const MeshSpec& spec, std::uint64_t seed, const std::string& neumann) {
  PolyMesh mesh;
  switch (spec.kind) {
    case MeshSpec::Kind::Cartesian:
      mesh = build_cartesian_mesh(spec.nx, spec.ny);
      break;
    case MeshSpec::Kind::Agglomerated:
      mesh = agglomerate(build_cartesian_mesh(spec.nx, spec.ny), spec.target, seed);
      break;
    case MeshSpec::Kind::File:
      mesh = read_mesh_file(spec.path);
      if (neumann.empty()) return mesh;
      break;
  }
  if (neumann.empty()) return mesh;
  return classify_boundary(mesh, neumann_predicate(neumann, mesh.bounding_box()));
}

void ExperimentConfig::validate() const {
  if (meshes.empty()) throw ConfigError("no meshes given");
  for (const auto& m : meshes) MeshSpec::parse(m);
  if (degree < 1 || degree > 15) throw ConfigError("degree must lie in [1, 15]");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(mu > 0.0)) throw ConfigError("mu must be positive");
  if (dts.empty()) throw ConfigError("dt list is empty");
  for (double dt : dts) {
    if (!(dt > 0.0)) throw ConfigError("dt values must be positive");
  }
  if (solvers.empty()) throw ConfigError("solver list is empty");
  if (!(tol > 0.0 && tol < 1.0)) throw ConfigError("tol must lie in (0, 1)");
  if (maxit < 1) throw ConfigError("maxit must be at least 1");
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (!(lanczos_tol > 0.0 && lanczos_tol < 1.0)) throw ConfigError("lanczos tol must lie in (0, 1)");
  if (lanczos_maxit < 1) throw ConfigError("lanczos maxit must be at least 1");
  if (condition_preconditioner != "none" && condition_preconditioner != "pcg-bj" &&
      condition_preconditioner != "pcg-cbj") {
    throw ConfigError("condition preconditioner must be none, pcg-bj or pcg-cbj");
  }
  if (study != "space" && study != "time") throw ConfigError("study must be space or time");
  if (field != "trig" && field != "poly") throw ConfigError("field must be trig or poly");
  if (steps < 1) throw ConfigError("steps must be at least 1");
  if (!(final_time > 0.0)) throw ConfigError("final time must be positive");
  try {
    neumann_predicate(neumann);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

std::string ExperimentConfig::canonical() const {
  std::string out;
  auto line = [&](const std::string& k, const std::string& v) { out += k + "=" + v + "\n"; };
  line("mesh.specs", join(meshes, [](const std::string& s) { return s; }));
  line("mesh.seed", std::to_string(mesh_seed));
  line("mesh.neumann", neumann);
  line("discretisation.degree", std::to_string(degree));
  line("discretisation.alpha", format_double(alpha));
  line("discretisation.mu", format_double(mu));
  line("experiment.dt", join(dts, format_double));
  line("experiment.solvers", join(solvers, solver_name));
  line("experiment.repetitions", std::to_string(repetitions));
  line("experiment.seed", std::to_string(seed));
  line("solver.tol", format_double(tol));
  line("solver.maxit", std::to_string(maxit));
  line("condition.tol", format_double(lanczos_tol));
  line("condition.maxit", std::to_string(lanczos_maxit));
  line("condition.method", method_name(condition_method));
  line("condition.dense_limit", std::to_string(dense_limit));
  line("condition.preconditioner", condition_preconditioner);
  line("convergence.study", study);
  line("convergence.field", field);
  line("convergence.steps", std::to_string(steps));
  line("convergence.final_time", format_double(final_time));
  line("convergence.solver", solver_name(solver));
  return out;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(canonical()); }

void apply_setting(ExperimentConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  try {
    if (key == "mesh.specs") {
      c.meshes = split_list(value);
    } else if (key == "mesh.seed") {
      c.mesh_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "mesh.neumann") {
      c.neumann = value;
    } else if (key == "discretisation.degree") {
      c.degree = parse_number<int>(key, value);
    } else if (key == "discretisation.alpha") {
      c.alpha = parse_number<double>(key, value);
    } else if (key == "discretisation.mu") {
      c.mu = parse_number<double>(key, value);
    } else if (key == "experiment.dt") {
      c.dts.clear();
      for (const auto& s : split_list(value)) c.dts.push_back(parse_number<double>(key, s));
    } else if (key == "experiment.solvers") {
      c.solvers.clear();
      for (const auto& s : split_list(value)) c.solvers.push_back(parse_solver(s));
    } else if (key == "experiment.repetitions") {
      c.repetitions = parse_number<std::size_t>(key, value);
    } else if (key == "experiment.seed") {
      c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "solver.tol") {
      c.tol = parse_number<double>(key, value);
    } else if (key == "solver.maxit") {
      c.maxit = parse_number<std::size_t>(key, value);
    } else if (key == "condition.tol") {
      c.lanczos_tol = parse_number<double>(key, value);
    } else if (key == "condition.maxit") {
      c.lanczos_maxit = parse_number<std::size_t>(key, value);
    } else if (key == "condition.method") {
      if (value == "auto") {
        c.condition_method = ConditionMethod::Auto;
      } else if (value == "lanczos") {
        c.condition_method = ConditionMethod::Lanczos;
      } else if (value == "dense") {
        c.condition_method = ConditionMethod::Dense;
      } else {
        throw ConfigError(key + ": expected auto, lanczos or dense");
      }
    } else if (key == "condition.dense_limit") {
      c.dense_limit = parse_number<std::size_t>(key, value);
    } else if (key == "condition.preconditioner") {
      c.condition_preconditioner = value;
    } else if (key == "convergence.study") {
      c.study = value;
    } else if (key == "convergence.field") {
      c.field = value;
    } else if (key == "convergence.steps") {
      c.steps = parse_number<std::size_t>(key, value);
    } else if (key == "convergence.final_time") {
      c.final_time = parse_number<double>(key, value);
    } else if (key == "convergence.solver") {
      c.solver = parse_solver(value);
    } else if (key == "output.path") {
      c.output = value;
    } else {
      throw ConfigError("unknown setting '" + key + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError("setting '" + section + "' must appear inside a [section]");
    }
    for (const auto& [key, value] : body) {
      apply_setting(base, section + "." + key, value.data());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base));
}

bool balanced(double dt, double h, int degree) {
  return std::abs(std::log10(dt) - degree * std::log10(h)) <= 1.0;
}

std::vector<double> random_sigma(std::size_t n, std::uint64_t seed, std::size_t repetition) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(repetition),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(repetition) >> 32)};
  std::mt19937_64 gen(seq);
  std::vector<double> out(n);
  for (auto& v : out) v = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return out;
}

ExactField experiment_field(const ExperimentConfig& config) {
  if (config.field == "poly") return ExactField::polynomial(config.degree, TimeProfile::Oscillate);
  return ExactField::trigonometric(TimeProfile::Decay);
}

double IterationCell::mean() const {
  if (iterations.empty()) return 0.0;
  const double sum = std::accumulate(iterations.begin(), iterations.end(), 0.0);
  return sum / static_cast<double>(iterations.size());
}

const IterationCell& IterationTable::at(SolverKind solver, std::size_t dt_index,
                                        std::size_t mesh_index) const {
  for (const auto& c : cells) {
    if (c.solver == solver && c.dt_index == dt_index && c.mesh_index == mesh_index) return c;
  }
  throw std::out_of_range("no such iteration-table cell");
}

bool IterationTable::all_converged() const {
  for (const auto& c : cells) {
    if (c.failures) return false;
  }
  return true;
}

IterationTable run_iteration_table(const ExperimentConfig& config) {
  config.validate();
  IterationTable table;
  table.config = config;
  const SolverConfig solver_config{config.tol, config.maxit, false};
  const auto data = manufactured_problem(experiment_field(config), config.mu);
  const std::size_t nm = config.meshes.size(), nd = config.dts.size();
  std::vector<IterationCell> cells(config.solvers.size() * nd * nm);
  auto slot = [&](std::size_t s, std::size_t d, std::size_t m) -> IterationCell& {
    return cells[(s * nd + d) * nm + m];
  };

  for (std::size_t m = 0; m < nm; ++m) {
    const auto disc = discretise(config, config.meshes[m]);
    const DGSpace& space = *disc.space;
    table.meshes.push_back(describe(config.meshes[m], space));
    const DofLayout layout{space.num_elements(), space.local_dim()};
    // Mass part of every right-hand side; only dt F varies with dt.
    std::vector<std::vector<double>> mass_part;
    for (std::size_t r = 0; r < config.repetitions; ++r) {
      mass_part.push_back(disc.system.M * random_sigma(space.total_dofs(), config.seed, r));
    }
    for (std::size_t d = 0; d < nd; ++d) {
      const double dt = config.dts[d];
      const auto load = assemble_load(space, data, dt, config.alpha);
      const SparseMatrix system = build_system(disc.system.M, disc.system.A, dt);
      for (std::size_t s = 0; s < config.solvers.size(); ++s) {
        IterationCell& cell = slot(s, d, m);
        cell.solver = config.solvers[s];
        cell.dt_index = d;
        cell.mesh_index = m;
        cell.dt = dt;
        cell.balanced = balanced(dt, table.meshes[m].h, config.degree);
        const LinearSolver solver(system, layout, cell.solver, solver_config);
        std::vector<double> b(space.total_dofs());
        for (std::size_t r = 0; r < config.repetitions; ++r) {
          for (std::size_t i = 0; i < b.size(); ++i) b[i] = mass_part[r][i] + dt * load[i];
          const auto result = solver.solve(b);
          if (result.report.converged) {
            cell.iterations.push_back(result.report.iterations);
          } else {
            cell.iterations.push_back(config.maxit);
            ++cell.failures;
          }
        }
      }
    }
  }
  table.cells = std::move(cells);
  return table;
}

const ConditionCell& ConditionTable::at(std::size_t dt_index, std::size_t mesh_index) const {
  for (const auto& c : cells) {
    if (c.dt_index == dt_index && c.mesh_index == mesh_index) return c;
  }
  throw std::out_of_range("no such condition-table cell");
}

bool ConditionTable::all_converged() const {
  const bool prec = config.condition_preconditioner != "none";
  for (const auto& c : cells) {
    if (!c.raw.converged) return false;
    if (prec && !c.preconditioned.converged) return false;
  }
  return true;
}

ConditionTable run_condition_table(const ExperimentConfig& config) {
  config.validate();
  ConditionTable table;
  table.config = config;
  LanczosOptions lanczos;
  lanczos.tol = config.lanczos_tol;
  lanczos.max_iterations = config.lanczos_maxit;
  lanczos.seed = config.seed;
  const std::size_t nm = config.meshes.size(), nd = config.dts.size();
  std::vector<ConditionCell> cells(nd * nm);
  for (std::size_t m = 0; m < nm; ++m) {
    const auto disc = discretise(config, config.meshes[m]);
    const DGSpace& space = *disc.space;
    table.meshes.push_back(describe(config.meshes[m], space));
    const DofLayout layout{space.num_elements(), space.local_dim()};
    for (std::size_t d = 0; d < nd; ++d) {
      ConditionCell& cell = cells[d * nm + m];
      cell.dt_index = d;
      cell.mesh_index = m;
      cell.dt = config.dts[d];
      cell.balanced = balanced(cell.dt, table.meshes[m].h, config.degree);
      const SparseMatrix system = build_system(disc.system.M, disc.system.A, cell.dt);
      cell.raw = estimate_condition_number(system, nullptr, lanczos, config.condition_method,
                                           config.dense_limit);
      if (config.condition_preconditioner != "none") {
        const BlockJacobi bj(system, layout,
                             config.condition_preconditioner == "pcg-cbj"
                                 ? BlockLayout::Collective
                                 : BlockLayout::ComponentWise);
        cell.preconditioned = estimate_condition_number(system, &bj, lanczos,
                                                        config.condition_method,
                                                        config.dense_limit);
      }
    }
  }
  table.cells = std::move(cells);
  return table;
}

ConvergenceTable run_convergence(const ExperimentConfig& config) {
  config.validate();
  ConvergenceTable table;
  table.config = config;
  const ExactField exact = experiment_field(config);
  const auto data = manufactured_problem(exact, config.mu);
  const SolverConfig solver_config{config.tol, config.maxit, false};

  auto run_one = [&](const std::string& spec, double dt, double final_time) {
    const auto disc = discretise(config, spec);
    const auto time = TimeConfig::make(dt, final_time);
    const auto run = implicit_euler_run(*disc.space, disc.system, data, time, config.solver,
                                        solver_config);
    ConvergenceRow row;
    row.mesh = describe(spec, *disc.space);
    row.dt = dt;
    row.error = energy_error(*disc.space, run.sigma, exact, final_time, config.alpha, config.mu);
    return row;
  };

  if (config.study == "space") {
    const double dt = config.dts.front();
    for (const auto& spec : config.meshes) {
      table.rows.push_back(run_one(spec, dt, static_cast<double>(config.steps) * dt));
    }
  } else {
    for (double dt : config.dts) {
      table.rows.push_back(run_one(config.meshes.front(), dt, config.final_time));
    }
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    auto& row = table.rows[i];
    if (i == 0) {
      row.slope = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const auto& prev = table.rows[i - 1];
    const double ratio = config.study == "space" ? prev.mesh.h / row.mesh.h : prev.dt / row.dt;
    row.slope = std::log(prev.error / row.error) / std::log(ratio);
  }
  return table;
}

std::string table_header(const ExperimentConfig& config, const std::string& kind,
                         const std::string& prefix) {
  std::string out;
  out += fmt::format("{}psdg {}\n", prefix, kind);
  out += fmt::format("{}config_hash={:016x}\n", prefix, config.hash());
  out += fmt::format("{}seed={} mesh_seed={} repetitions={}\n", prefix, config.seed,
                     config.mesh_seed, config.repetitions);
  out += fmt::format("{}tol={:g} maxit={} lanczos_tol={:g} lanczos_maxit={}\n", prefix,
                     config.tol, config.maxit, config.lanczos_tol, config.lanczos_maxit);
  out += fmt::format("{}degree={} alpha={:g} mu={:g} neumann={}\n", prefix, config.degree,
                     config.alpha, config.mu, config.neumann);
  return out;
}

std::string to_csv(const IterationTable& table) {
  std::string out = table_header(table.config, "iter-table", "# ");
  out += "solver,dt,mesh,elements,h,dofs,mean_iterations,min_iterations,max_iterations,"
         "failures,balanced\n";
  for (const auto& c : table.cells) {
    const auto& m = table.meshes[c.mesh_index];
    const auto [lo, hi] = std::minmax_element(c.iterations.begin(), c.iterations.end());
    out += fmt::format("{},{:g},{},{},{:.6g},{},{:.1f},{},{},{},{}\n", solver_name(c.solver),
                       c.dt, m.spec, m.elements, m.h, m.dofs, c.mean(), *lo, *hi, c.failures,
                       c.balanced ? 1 : 0);
  }
  return out;
}

std::string to_markdown(const IterationTable& table) {
  const auto& config = table.config;
  std::string out = "## Mean iteration counts\n\n";
  out += table_header(config, "iter-table", "    ");
  out += "\n`*` balanced cell (dt within one order of h^p), `!` non-converged solves.\n";
  for (std::size_t s = 0; s < config.solvers.size(); ++s) {
    const SolverKind solver = config.solvers[s];
    out += fmt::format("\n### {}\n\n", solver_name(solver));
    std::vector<std::string> head{"dt"};
    for (const auto& m : table.meshes) head.push_back(mesh_label(m));
    out += markdown_row(head) + markdown_rule(head.size());
    for (std::size_t d = 0; d < config.dts.size(); ++d) {
      std::vector<std::string> row{fmt::format("{:g}", config.dts[d])};
      for (std::size_t m = 0; m < table.meshes.size(); ++m) {
        const auto& c = table.at(solver, d, m);
        row.push_back(fmt::format("{:.1f}{}{}", c.mean(), c.balanced ? "*" : "",
                                  c.failures ? "!" : ""));
      }
      out += markdown_row(row);
    }
  }
  return out;
}

std::string to_csv(const ConditionTable& table) {
  std::string out = table_header(table.config, "cond-table", "# ");
  out += "dt,mesh,elements,h,dofs,kappa,lambda_min,lambda_max,converged,exact,"
         "preconditioner,kappa_prec,converged_prec,balanced\n";
  const bool prec = table.config.condition_preconditioner != "none";
  for (const auto& c : table.cells) {
    const auto& m = table.meshes[c.mesh_index];
    out += fmt::format("{:g},{},{},{:.6g},{},{:.6e},{:.6e},{:.6e},{},{},{},{},{},{}\n", c.dt,
                       m.spec, m.elements, m.h, m.dofs, c.raw.condition, c.raw.lambda_min,
                       c.raw.lambda_max, c.raw.converged ? 1 : 0, c.raw.exact ? 1 : 0,
                       table.config.condition_preconditioner,
                       prec ? fmt::format("{:.6e}", c.preconditioned.condition) : "",
                       prec ? (c.preconditioned.converged ? "1" : "0") : "",
                       c.balanced ? 1 : 0);
  }
  return out;
}

std::string to_markdown(const ConditionTable& table) {
  const auto& config = table.config;
  const bool prec = config.condition_preconditioner != "none";
  std::string out = "## Condition numbers\n\n";
  out += table_header(config, "cond-table", "    ");
  out += "\n`*` balanced cell, `?` estimate not converged, `=` exact (dense).\n";
  auto section = [&](const std::string& title, bool preconditioned) {
    out += fmt::format("\n### {}\n\n", title);
    std::vector<std::string> head{"dt"};
    for (const auto& m : table.meshes) head.push_back(mesh_label(m));
    out += markdown_row(head) + markdown_rule(head.size());
    for (std::size_t d = 0; d < config.dts.size(); ++d) {
      std::vector<std::string> row{fmt::format("{:g}", config.dts[d])};
      for (std::size_t m = 0; m < table.meshes.size(); ++m) {
        const auto& c = table.at(d, m);
        const auto& est = preconditioned ? c.preconditioned : c.raw;
        row.push_back(fmt::format("{:.2e}{}{}{}", est.condition, est.exact ? "=" : "",
                                  est.converged ? "" : "?", c.balanced ? "*" : ""));
      }
      out += markdown_row(row);
    }
  };
  section("A*", false);
  if (prec) section(fmt::format("A* with {}", config.condition_preconditioner), true);
  return out;
}

std::string to_csv(const ConvergenceTable& table) {
  std::string out = table_header(table.config, "convergence", "# ");
  out += "study,field,mesh,elements,h,dt,error,slope\n";
  for (const auto& r : table.rows) {
    out += fmt::format("{},{},{},{},{:.6g},{:g},{:.6e},{}\n", table.config.study,
                       table.config.field, r.mesh.spec, r.mesh.elements, r.mesh.h, r.dt,
                       r.error, std::isnan(r.slope) ? "" : fmt::format("{:.3f}", r.slope));
  }
  return out;
}

std::string to_markdown(const ConvergenceTable& table) {
  std::string out = "## Energy-norm convergence\n\n";
  out += table_header(table.config, "convergence", "    ");
  out += fmt::format("\nstudy: {}, field: {}\n\n", table.config.study, table.config.field);
  const std::vector<std::string> head{"mesh", "h", "dt", "error", "slope"};
  out += markdown_row(head) + markdown_rule(head.size());
  for (const auto& r : table.rows) {
    out += markdown_row({mesh_label(r.mesh), fmt::format("{:.4g}", r.mesh.h),
                         fmt::format("{:g}", r.dt), fmt::format("{:.4e}", r.error),
                         std::isnan(r.slope) ? "-" : fmt::format("{:.2f}", r.slope)});
  }
  return out;
}

}  // namespace psdg
