#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "convexburgers/duality.hpp"
#include "convexburgers/errors.hpp"
#include "convexburgers/fv_oracle.hpp"
#include "convexburgers/hopf_lax.hpp"
#include "convexburgers/initial_data.hpp"
#include "convexburgers/primal_solver.hpp"
#include "convexburgers/scenario.hpp"
#include "convexburgers/shock_free.hpp"

namespace py = pybind11;
using namespace convexburgers;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

SampledFn to_sampled(const Array& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D array of node samples");
  return SampledFn(PeriodicGrid(static_cast<std::size_t>(a.size())),
                   std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

Array to_array(const std::vector<double>& v, std::size_t rows, std::size_t cols) {
  Array out({static_cast<py::ssize_t>(rows), static_cast<py::ssize_t>(cols)});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Periodic inviscid Burgers: Hopf-Lax solutions, shock-free substitutes and the dual space-time solver.";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  m.def("shock_time", [](const Array& u0) { return hopf_lax::shock_time(antiderivative_zero_mean(to_sampled(u0))); },
        py::arg("u0"));

  m.def(
      "hopf_lax",
      [](const Array& u0, double t) {
        const auto sol = hopf_lax::solve(antiderivative_zero_mean(to_sampled(u0)), t);
        return py::make_tuple(to_array(sol.phi.values), to_array(sol.u.values));
      },
      py::arg("u0"), py::arg("t"), "Potential and velocity at time t, sampled on the nodes of u0.");

  m.def(
      "substitute",
      [](const Array& u0, double T) {
        const auto sub = shock_free::substitute(antiderivative_zero_mean(to_sampled(u0)), T);
        py::dict d;
        d["phi0T"] = to_array(sub.phi0T.values);
        d["u0T"] = to_array(sub.u0T.values);
        d["rho0"] = to_array(sub.rho0.values);
        d["omega"] = std::vector<bool>(sub.omega.begin(), sub.omega.end());
        d["no_shock_margin"] = shock_free::no_shock_margin(sub);
        d["w1_at_T"] = shock_free::wasserstein1_to_uniform(shock_free::pushforward(sub, T));
        return d;
      },
      py::arg("u0"), py::arg("T"));

  m.def(
      "optimal_values",
      [](const Array& u0, double T) {
        const auto phi0 = antiderivative_zero_mean(to_sampled(u0));
        return py::make_tuple(shock_free::optimal_value_hj(phi0, T),
                              shock_free::optimal_value_contact(shock_free::substitute(phi0, T)));
      },
      py::arg("u0"), py::arg("T"), "(J from the Hopf-Lax potential, J from the contact set).");

  m.def(
      "godunov",
      [](const Array& u0, double t, double cfl) {
        return to_array(fv::advance({to_sampled(u0), 0.0, cfl}, t).u.values);
      },
      py::arg("u0"), py::arg("t"), py::arg("cfl") = 0.9);

  m.def("burgers_K", &burgers_K, py::arg("A"), py::arg("B"));
  m.def(
      "conjugate_K_burgers",
      [](double A, double B) {
        Eigen::VectorXd a(1), b(1);
        a << A;
        b << B;
        return conjugate_K(BurgersSystem{}, a, b);
      },
      py::arg("A"), py::arg("B"));

  m.def(
      "random_trig",
      [](std::size_t n, std::uint64_t seed, int degree) {
        return to_array(initial_data::random_trig(PeriodicGrid(n), seed, degree).values);
      },
      py::arg("n"), py::arg("seed"), py::arg("degree"));

  m.def(
      "solve_primal",
      [](const Array& u0, double T, std::size_t nt, double tol, std::size_t max_iterations) {
        const auto data = to_sampled(u0);
        const SpaceTimeGrid g(data.size(), nt, T);
        primal::SolverOptions opts;
        opts.tol = tol;
        opts.max_iterations = max_iterations;
        primal::PrimalResult res = [&] {
          py::gil_scoped_release release;
          return primal::solve_primal(data, T, g, opts);
        }();
        py::dict d;
        d["rho"] = to_array(res.iterate.rho, nt, g.n);
        d["q"] = to_array(res.iterate.q, nt, g.n);
        d["W"] = to_array(res.iterate.W, nt + 1, g.n);
        d["objective"] = to_array(res.report.objective_history);
        d["gap"] = to_array(res.report.gap_history);
        d["residual"] = to_array(res.report.residual_history);
        d["iterations"] = res.report.iterations;
        d["converged"] = res.report.converged;
        d["reference_value"] = res.report.reference_value;
        return d;
      },
      py::arg("u0"), py::arg("T"), py::arg("nt"), py::arg("tol") = 1e-3, py::arg("max_iterations") = 2000);

  m.def(
      "run_scenario",
      [](const std::string& config) { return cli::run(cli::parse_config(config)).exit_code; },
      py::arg("config"), "Runs a JSON scenario and returns the exit code. Invalid configs raise Error.");
}
