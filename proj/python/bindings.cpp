#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wbary/badmm.hpp"
#include "wbary/cluster.hpp"
#include "wbary/datagen.hpp"
#include "wbary/io.hpp"
#include "wbary/pam.hpp"
#include "wbary/parallel.hpp"
#include "wbary/projections.hpp"
#include "wbary/transport.hpp"

namespace py = pybind11;
using namespace wbary;

namespace {

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["method"] = r.method;
  d["objval"] = r.objval;
  d["pinfeas"] = r.pinfeas;
  d["outer_iterations"] = r.outer_iterations;
  d["inner_iterations"] = r.inner_iterations;
  d["wall_time_s"] = r.wall_time_s;
  d["m"] = r.m;
  d["seed"] = r.seed;
  d["converged"] = r.converged;
  d["config"] = r.config;
  return d;
}

py::dict solution_dict(const BarycenterState& s, const SolveReport& r) {
  py::dict d;
  d["w"] = s.w;
  d["x"] = s.x;
  d["plans"] = s.plans;
  d["report"] = report_dict(r);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Free-support Wasserstein barycenters";

  py::register_exception<InvalidArgument>(mod, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ParseError>(mod, "ParseError", PyExc_ValueError);
  py::register_exception<NumericalError>(mod, "NumericalError", PyExc_ArithmeticError);

  py::class_<DiscreteDistribution>(mod, "Distribution")
      .def(py::init<Matrix, Vector>(), py::arg("support"), py::arg("weights"))
      .def_static("from_masses", &DiscreteDistribution::from_masses, py::arg("support"),
                  py::arg("masses"))
      .def_property_readonly("support", &DiscreteDistribution::support)
      .def_property_readonly("weights", &DiscreteDistribution::weights)
      .def_property_readonly("dim", &DiscreteDistribution::dim)
      .def("__len__", &DiscreteDistribution::size)
      .def("__repr__", [](const DiscreteDistribution& p) {
        return "<Distribution n=" + std::to_string(p.size()) + " d=" + std::to_string(p.dim()) +
               ">";
      });

  mod.def(
      "generate",
      [](const std::string& family, Index n, Index d, const std::string& nt, std::uint64_t seed) {
        GenSpec spec;
        spec.family = parse_family(family);
        spec.count = n;
        spec.dim = d;
        spec.seed = seed;
        spec.nt_grid = parse_grid(nt);
        spec.nt = spec.nt_grid.front();
        return generate(spec);
      },
      py::arg("family") = "mvn-t", py::arg("n") = 20, py::arg("d") = 2, py::arg("nt") = "10",
      py::arg("seed") = 0);

  mod.def("read_distributions", &read_distributions, py::arg("path"));
  mod.def(
      "write_distributions",
      [](const std::string& path, const std::vector<DiscreteDistribution>& data) {
        write_distributions(path, data);
      },
      py::arg("path"), py::arg("data"));

  mod.def("project_simplex", &project_simplex, py::arg("v"), py::arg("radius") = 1.0);

  mod.def(
      "solve_transport",
      [](const Matrix& cost, const Vector& p, const Vector& q) {
        TransportSolution s;
        {
          py::gil_scoped_release release;
          s = solve_transport({cost, p, q});
        }
        return py::make_tuple(s.value, s.plan);
      },
      py::arg("cost"), py::arg("p"), py::arg("q"));

  mod.def("w2_distance", &w2_distance, py::arg("p"), py::arg("q"),
          py::call_guard<py::gil_scoped_release>());

  mod.def(
      "evaluate_objval",
      [](const Vector& w, const Matrix& x, const std::vector<DiscreteDistribution>& data) {
        return evaluate_objval(w, x, BarycenterProblem(data, w.size()));
      },
      py::arg("w"), py::arg("x"), py::arg("data"), py::call_guard<py::gil_scoped_release>());

  mod.def(
      "solve_pam",
      [](const std::vector<DiscreteDistribution>& data, Index m, std::uint64_t seed,
         double pinf_tol, long max_iter) {
        PamConfig config;
        config.seed = seed;
        config.pinf_tol = pinf_tol;
        config.k_max = max_iter;
        PamResult r;
        {
          py::gil_scoped_release release;
          r = solve_barycenter(BarycenterProblem(data, m), config);
        }
        return solution_dict(r.state, r.report);
      },
      py::arg("data"), py::arg("m"), py::arg("seed") = 0, py::arg("pinf_tol") = 1e-4,
      py::arg("max_iter") = 100);

  mod.def(
      "solve_badmm",
      [](const std::vector<DiscreteDistribution>& data, Index m, std::uint64_t seed,
         double pinf_tol, long max_iter, double rho) {
        BadmmConfig config;
        config.seed = seed;
        config.pinf_tol = pinf_tol;
        config.k_max = max_iter;
        config.rho_kl = rho;
        BadmmResult r;
        {
          py::gil_scoped_release release;
          r = solve_badmm(BarycenterProblem(data, m), config);
        }
        return solution_dict(r.state, r.report);
      },
      py::arg("data"), py::arg("m"), py::arg("seed") = 0, py::arg("pinf_tol") = 1e-4,
      py::arg("max_iter") = 2000, py::arg("rho") = 0.0);

  mod.def(
      "d2_cluster",
      [](const std::vector<DiscreteDistribution>& data, Index k, Index m, std::uint64_t seed,
         long max_rounds) {
        ClusterConfig config;
        config.k = k;
        config.m = m;
        config.seed = seed;
        config.max_rounds = max_rounds;
        ClusterModel model;
        {
          py::gil_scoped_release release;
          model = d2_cluster(data, config);
        }
        py::list centroids;
        for (const auto& c : model.centroids) centroids.append(py::make_tuple(c.weights, c.support));
        py::dict d;
        d["assignments"] = model.assignments;
        d["distances"] = model.distances;
        d["objective"] = model.objective;
        d["rounds"] = model.rounds;
        d["converged"] = model.converged;
        d["centroids"] = centroids;
        return d;
      },
      py::arg("data"), py::arg("k"), py::arg("m"), py::arg("seed") = 0,
      py::arg("max_rounds") = 10);

  mod.def("set_num_threads", &set_num_threads, py::arg("n"));
  mod.def("num_threads", &num_threads);
}
