#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fmt/format.h>

#include <algorithm>
#include <iterator>
#include <memory>

#include "psdg/assembly.hpp"
#include "psdg/bench.hpp"
#include "psdg/lanczos.hpp"
#include "psdg/timestepper.hpp"

namespace py = pybind11;
using namespace psdg;

namespace {

template <typename T, typename Range>
py::array_t<T> to_array_of(const Range& v) {
  py::array_t<T> out(static_cast<py::ssize_t>(std::size(v)));
  std::copy(std::begin(v), std::end(v), out.mutable_data());
  return out;
}

py::array_t<double> to_array(const std::vector<double>& v) { return to_array_of<double>(v); }

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
  return {a.data(), a.data() + a.size()};
}

// (shape, indptr, indices, data) as accepted by scipy.sparse.csr_matrix.
py::tuple to_csr(const SparseMatrix& m) {
  auto offsets = m.row_offsets();
  auto cols = m.col_indices();
  auto values = m.values();
  auto indptr = to_array_of<std::int64_t>(offsets);
  auto indices = to_array_of<std::int64_t>(cols);
  auto data = to_array_of<double>(values);
  return py::make_tuple(py::make_tuple(m.rows(), m.cols()), indptr, indices, data);
}

struct Mesh {
  std::shared_ptr<const PolyMesh> mesh;
};

struct System {
  std::shared_ptr<const DGSpace> space;
  SystemMatrices matrices;
};

struct Solver {
  std::shared_ptr<const DGSpace> space;
  std::unique_ptr<LinearSolver> solver;
};

const SparseMatrix& pick(const System& s, const std::string& name) {
  const auto& m = s.matrices;
  if (name == "M1") return m.M1;
  if (name == "B1") return m.B1;
  if (name == "B2") return m.B2;
  if (name == "B3") return m.B3;
  if (name == "M") return m.M;
  if (name == "A") return m.A;
  throw py::key_error(name);
}

py::dict report_dict(const SolverReport& r) {
  py::dict d;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["relative_residual"] = r.relative_residual;
  d["history"] = r.history;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pseudo-stress PolyDG solver core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Mesh>(m, "Mesh")
      .def(py::init([](const std::string& spec, std::uint64_t seed, const std::string& neumann) {
             return Mesh{std::make_shared<const PolyMesh>(
                 build_mesh(MeshSpec::parse(spec), seed, neumann))};
           }),
           py::arg("spec"), py::arg("seed") = 7, py::arg("neumann") = "right")
      .def_property_readonly("num_elements", [](const Mesh& s) { return s.mesh->num_elements(); })
      .def_property_readonly("num_faces", [](const Mesh& s) { return s.mesh->num_faces(); })
      .def_property_readonly("h", [](const Mesh& s) { return s.mesh->mesh_size(); })
      .def("count_faces", [](const Mesh& s, const std::string& kind) {
        if (kind == "interior") return s.mesh->count_faces(FaceKind::Interior);
        if (kind == "dirichlet") return s.mesh->count_faces(FaceKind::Dirichlet);
        if (kind == "neumann") return s.mesh->count_faces(FaceKind::Neumann);
        throw py::value_error("face kind must be interior, dirichlet or neumann");
      });

  py::class_<System>(m, "System")
      .def(py::init([](const Mesh& mesh, int degree, double mu, double alpha) {
             auto space = std::make_shared<const DGSpace>(mesh.mesh, degree);
             return System{space, assemble_system(*space, mu, alpha)};
           }),
           py::arg("mesh"), py::arg("degree") = 3, py::arg("mu") = 1.0, py::arg("alpha") = 10.0)
      .def_property_readonly("local_dim", [](const System& s) { return s.space->local_dim(); })
      .def_property_readonly("scalar_dofs", [](const System& s) { return s.space->scalar_dofs(); })
      .def_property_readonly("total_dofs", [](const System& s) { return s.space->total_dofs(); })
      .def("csr", [](const System& s, const std::string& name) { return to_csr(pick(s, name)); },
           py::arg("name"))
      .def("system_csr",
           [](const System& s, double dt) {
             return to_csr(build_system(s.matrices.M, s.matrices.A, dt));
           },
           py::arg("dt"))
      .def("mass", [](const System& s, const py::array_t<double>& x) {
        return to_array(s.matrices.M * std::span<const double>(to_vector(x)));
      })
      .def("condition_number",
           [](const System& s, double dt, const std::string& preconditioner,
              const std::string& method, double tol, std::size_t maxit) {
             const auto star = build_system(s.matrices.M, s.matrices.A, dt);
             std::unique_ptr<BlockJacobi> bj;
             const DofLayout layout{s.space->num_elements(), s.space->local_dim()};
             if (preconditioner == "pcg-bj") {
               bj = std::make_unique<BlockJacobi>(star, layout, BlockLayout::ComponentWise);
             } else if (preconditioner == "pcg-cbj") {
               bj = std::make_unique<BlockJacobi>(star, layout, BlockLayout::Collective);
             } else if (preconditioner != "none") {
               throw py::value_error("preconditioner must be none, pcg-bj or pcg-cbj");
             }
             ConditionMethod cm = ConditionMethod::Auto;
             if (method == "lanczos") cm = ConditionMethod::Lanczos;
             else if (method == "dense") cm = ConditionMethod::Dense;
             else if (method != "auto") throw py::value_error("method must be auto, lanczos or dense");
             LanczosOptions opts;
             opts.tol = tol;
             opts.max_iterations = maxit;
             const auto est = estimate_condition_number(star, bj.get(), opts, cm);
             py::dict d;
             d["lambda_min"] = est.lambda_min;
             d["lambda_max"] = est.lambda_max;
             d["condition"] = est.condition;
             d["converged"] = est.converged;
             d["exact"] = est.exact;
             d["iterations"] = est.iterations;
             return d;
           },
           py::arg("dt"), py::arg("preconditioner") = "none", py::arg("method") = "auto",
           py::arg("tol") = 1e-6, py::arg("maxit") = 400);

  py::class_<Solver>(m, "Solver")
      .def(py::init([](const System& s, double dt, const std::string& kind, double tol,
                       std::size_t maxit, bool record_history) {
             SolverConfig cfg;
             cfg.tol = tol;
             cfg.maxit = maxit;
             cfg.record_history = record_history;
             return Solver{s.space, std::make_unique<LinearSolver>(
                                        build_system(s.matrices.M, s.matrices.A, dt),
                                        DofLayout{s.space->num_elements(), s.space->local_dim()},
                                        parse_solver(kind), cfg)};
           }),
           py::arg("system"), py::arg("dt"), py::arg("kind") = "dcg", py::arg("tol") = 1e-8,
           py::arg("maxit") = 100000, py::arg("record_history") = false)
      .def("solve", [](const Solver& s, const py::array_t<double>& b) {
        const auto rhs = to_vector(b);
        if (rhs.size() != s.solver->system().rows()) throw py::value_error("size mismatch");
        SolveResult res;
        {
          py::gil_scoped_release release;
          res = s.solver->solve(rhs);
        }
        return py::make_tuple(to_array(res.x), report_dict(res.report));
      });

  m.def("random_sigma", [](std::size_t n, std::uint64_t seed, std::size_t rep) {
    return to_array(random_sigma(n, seed, rep));
  }, py::arg("n"), py::arg("seed"), py::arg("repetition") = 0);

  m.def("config_hash", [](const std::string& text) {
    const auto c = parse_config(text);
    c.validate();
    return fmt::format("{:016x}", c.hash());
  }, py::arg("ini_text"));

  m.def("iter_table", [](const std::string& text) {
    const auto c = parse_config(text);
    c.validate();
    IterationTable t;
    {
      py::gil_scoped_release release;
      t = run_iteration_table(c);
    }
    return py::make_tuple(to_csv(t), to_markdown(t));
  }, py::arg("ini_text"), "Returns (csv, markdown).");

  m.def("cond_table", [](const std::string& text) {
    const auto c = parse_config(text);
    c.validate();
    ConditionTable t;
    {
      py::gil_scoped_release release;
      t = run_condition_table(c);
    }
    return py::make_tuple(to_csv(t), to_markdown(t));
  }, py::arg("ini_text"), "Returns (csv, markdown).");

  m.def("convergence", [](const std::string& text) {
    const auto c = parse_config(text);
    c.validate();
    ConvergenceTable t;
    {
      py::gil_scoped_release release;
      t = run_convergence(c);
    }
    return py::make_tuple(to_csv(t), to_markdown(t));
  }, py::arg("ini_text"), "Returns (csv, markdown).");
}
