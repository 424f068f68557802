#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>

#include "convexburgers/errors.hpp"
#include "convexburgers/hopf_lax.hpp"
#include "convexburgers/primal_solver.hpp"
#include "convexburgers/shock_free.hpp"
#include "oracles.hpp"

using namespace convexburgers;
using oracle::pi;

namespace {

const double tstar = 1.0 / (2 * pi);

SampledFn sine(std::size_t n) {
  return SampledFn::sample(PeriodicGrid(n), [](double x) { return std::sin(2 * pi * x); });
}

// q^2/2rho - c q + r/2 |(rho, q) - y|^2, minimized in q for fixed rho
double prox_cost(double rho, double q, double yr, double yq, double c, double r) {
  const double kin = rho > 0 ? q * q / (2 * rho) : (q == 0 ? 0.0 : std::numeric_limits<double>::infinity());
  return kin - c * q + 0.5 * r * ((rho - yr) * (rho - yr) + (q - yq) * (q - yq));
}

double prox_oracle(double yr, double yq, double c, double r) {
  const auto reduced = [&](double rho) {
    const double q = (c + r * yq) / (1.0 / rho + r);
    return prox_cost(rho, q, yr, yq, c, r);
  };
  // golden section on (0, hi]
  double lo = 0.0;
  double hi = std::abs(yr) + std::abs(yq) + std::abs(c) / r + 10.0;
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 300; ++it) {
    const double m1 = hi - g * (hi - lo);
    const double m2 = lo + g * (hi - lo);
    (reduced(m1) < reduced(m2) ? hi : lo) = (reduced(m1) < reduced(m2) ? m2 : m1);
  }
  const double rho = 0.5 * (lo + hi);
  return std::min(rho > 0 ? reduced(rho) : prox_cost(0, 0, yr, yq, c, r), prox_cost(0, 0, yr, yq, c, r));
}

// (1 - B W, A W) for a node field W with row nt zero
primal::PrimalIterate from_dual(const SpaceTimeGrid& g, const std::vector<double>& W) {
  primal::PrimalIterate it(g);
  it.W = W;
  staggered::time_difference(g, W, it.q);
  staggered::space_difference(g, W, it.rho);
  for (auto& r : it.rho) r = 1.0 - r;
  return it;
}

// substitute solution u^T at the slab midpoint of every cell, L1(rho) against v on non-vacuum cells
double velocity_vs_substitute(const primal::PrimalIterate& it, const SampledFn& u0, double floor) {
  const auto& g = it.grid;
  const auto sub = shock_free::substitute(antiderivative_zero_mean(u0), g.T);
  const auto vel = primal::extract_velocity(it, floor);
  double err = 0.0;
  double mass = 0.0;
  for (std::size_t k = 0; k < g.nt; ++k) {
    const auto uT = hopf_lax::solve(sub.phi0T, g.time(k) + 0.5 * g.dt()).u;
    const auto uc = staggered::to_cell_midpoints(uT.values);
    for (std::size_t i = 0; i < g.n; ++i) {
      const std::size_t c = k * g.n + i;
      if (vel.vacuum[c]) continue;
      err += std::abs(vel.v[c] - uc[i]) * it.rho[c];
      mass += it.rho[c];
    }
  }
  return err / mass;
}

void check_run(const primal::PrimalResult& res, const SampledFn& u0, const primal::SolverOptions& opts) {
  const auto& it = res.iterate;
  const auto& rep = res.report;
  const auto& g = it.grid;
  CHECK(rep.iterations == rep.objective_history.size());
  CHECK(rep.gap_history.size() == rep.iterations);
  CHECK(rep.residual_history.size() == rep.iterations);
  for (double r : it.rho) REQUIRE(r >= 0.0);
  for (std::size_t i = 0; i < g.n; ++i) CHECK(it.W[g.nt * g.n + i] == 0.0);

  const double sup2 = u0.max_abs() * u0.max_abs();
  const double slack = 5 * (g.dx() + g.dt()) * sup2;
  for (double obj : rep.objective_history) CHECK(obj <= rep.reference_value + slack);
  const double final_obj = rep.objective_history.back();
  CHECK(final_obj >= 0.0);
  CHECK(final_obj <= g.T * sup2 / 2 + slack);

  if (rep.converged) {
    CHECK(std::abs(rep.gap_history.back()) <= opts.tol);
    CHECK(primal::continuity_residual(it) <= 10 * opts.tol);
    CHECK(primal::continuity_residual(it) == doctest::Approx(rep.residual_history.back()));
    // flux constraint recovery from the multiplier
    std::vector<double> a(g.cell_count());
    std::vector<double> b(g.cell_count());
    staggered::time_difference(g, it.W, a);
    staggered::space_difference(g, it.W, b);
    const auto vel = primal::extract_velocity(it, 1e-2);
    double err = 0.0;
    double mass = 0.0;
    double pres = 0.0;
    for (std::size_t c = 0; c < g.cell_count(); ++c) pres = std::max(pres, std::abs(1 - b[c] - it.rho[c]));
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
      // rho >= 0, so d_x W can exceed 1 only by the splitting residual
      CHECK(b[c] <= 1 + pres + 1e-12);
      if (!vel.vacuum[c] && 1 - b[c] > 1e-2) {
        err += std::abs(vel.v[c] - a[c] / (1 - b[c])) * it.rho[c];
        mass += it.rho[c];
      }
    }
    CHECK(err / mass <= 10 * opts.tol);
  }
}

double final_velocity_l1(const primal::PrimalIterate& it, const SampledFn& u0) {
  const auto& g = it.grid;
  const auto vel = primal::extract_velocity(it, 1e-3);
  const auto u = hopf_lax::solve(antiderivative_zero_mean(u0), g.T).u;
  const auto uc = staggered::to_cell_midpoints(u.values);
  double err = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) err += std::abs(vel.v[(g.nt - 1) * g.n + i] - uc[i]);
  return err * g.dx();
}

}  // namespace

TEST_CASE("prox of the kinetic cost") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  std::uniform_real_distribution<double> ur(0.05, 20);
  for (int k = 0; k < 500; ++k) {
    const double yr = u(rng), yq = u(rng), c = u(rng), r = ur(rng);
    const auto p = primal::prox_kinetic(yr, yq, c, r);
    CHECK(p.rho >= 0.0);
    const double got = prox_cost(p.rho, p.q, yr, yq, c, r);
    CHECK(got <= prox_oracle(yr, yq, c, r) + 1e-9 * (1 + std::abs(got)));
  }
  const auto z = primal::prox_kinetic(-1.0, 0.0, 0.0, 1.0);
  CHECK(z.rho == 0.0);
  CHECK(z.q == 0.0);
}

TEST_CASE("objective conventions and velocity extraction") {
  const SpaceTimeGrid g(8, 4, 1.0);
  const auto u0 = sine(8);
  primal::PrimalIterate it(g);
  CHECK(primal::primal_objective(g, it.rho, it.q, u0) == 0.0);
  CHECK(primal::continuity_residual(it) == 0.0);
  const auto v = primal::extract_velocity(it, 1e-3);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    CHECK(v.v[c] == 0.0);
    CHECK_FALSE(v.vacuum[c]);
  }
  it.rho[5] = 0.0;
  CHECK(primal::primal_objective(g, it.rho, it.q, u0) == 0.0);
  CHECK(primal::extract_velocity(it, 1e-3).vacuum[5]);
  it.q[5] = 1.0;
  CHECK(primal::primal_objective(g, it.rho, it.q, u0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("continuity residual vanishes on the dual parametrization") {
  const SpaceTimeGrid g(32, 16, 0.3);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> W(g.node_count(), 0.0);
  for (std::size_t j = 0; j < g.nt * g.n; ++j) W[j] = 0.01 * u(rng);
  CHECK(primal::continuity_residual(from_dual(g, W)) <= 1e-12);
}

TEST_CASE("exact solution on the grid satisfies the discrete constraint") {
  for (double f : {0.5, 2.0}) {
    for (std::size_t n : {64u, 128u, 256u}) {
      const SpaceTimeGrid g(n, n, f * tstar);
      const auto sub = shock_free::substitute(antiderivative_zero_mean(sine(n)), g.T);
      const auto it = primal::iterate_from_substitute(sub, g.nt);
      REQUIRE(it.grid.n == n);
      CHECK(primal::continuity_residual(it) <= 10 * (g.dx() + g.dt()));
      for (std::size_t i = 0; i < n; ++i) CHECK(it.W[g.nt * n + i] == 0.0);
      for (double r : it.rho) CHECK(r >= -1e-12);
      // close to the particle measure binned at the slab midpoints
      double dist = 0.0;
      for (std::size_t k = 0; k < g.nt; ++k) {
        double mass = 0.0;
        const auto b = shock_free::bin_to_cells(shock_free::pushforward(sub, g.time(k) + 0.5 * g.dt()), n);
        for (std::size_t i = 0; i < n; ++i) {
          mass += it.rho[k * n + i] * g.dx();
          dist += (std::abs(it.rho[k * n + i] - b.rho[i]) + std::abs(it.q[k * n + i] - b.q[i])) * g.cell_volume();
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
      }
      MESSAGE("T/T* = " << f << " n = " << n << " L1 to binned particles " << dist);
      CHECK(dist <= 10 * (g.dx() + g.dt()));
    }
  }
}

TEST_CASE("zero data is optimal at the start") {
  const SpaceTimeGrid g(32, 32, 0.5);
  const auto res = primal::solve_primal(SampledFn::zeros(PeriodicGrid(32)), 0.5, g);
  CHECK(res.report.converged);
  CHECK(res.report.iterations <= 5);
  CHECK(std::abs(res.report.gap_history.back()) <= 1e-10);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    CHECK(res.iterate.rho[c] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(res.iterate.q[c]) <= 1e-10);
  }
}

TEST_CASE("solver input errors") {
  const SpaceTimeGrid g(16, 16, 0.5);
  const auto u0 = sine(16);
  primal::SolverOptions bad;
  bad.r = 0.0;
  CHECK_THROWS_AS(primal::solve_primal(u0, 0.5, g, bad), BadOptions);
  bad.r = -1.0;
  CHECK_THROWS_AS(primal::solve_primal(u0, 0.5, g, bad), BadOptions);
  primal::SolverOptions badtol;
  badtol.tol = 0.0;
  CHECK_THROWS_AS(primal::solve_primal(u0, 0.5, g, badtol), BadOptions);
  CHECK_THROWS_AS(primal::solve_primal(u0, 0.4, g), InvalidTime);
  CHECK_THROWS_AS(primal::solve_primal(u0, -0.5, g), InvalidTime);
  auto shifted = u0;
  for (auto& v : shifted.values) v += 0.5;
  CHECK_THROWS_AS(primal::solve_primal(shifted, 0.5, g), NonZeroMean);
}

TEST_CASE("sustained decrease is reported as divergence") {
  const SpaceTimeGrid g(32, 32, 2 * tstar);
  primal::SolverOptions opts;
  opts.burn_in = 0;
  opts.divergence_window = 2;
  opts.tol = 1e-12;
  CHECK_THROWS_AS(primal::solve_primal(sine(32), g.T, g, opts), Diverged);
}

TEST_CASE("sin data before the shock") {
  const SpaceTimeGrid g(128, 128, 0.5 * tstar);
  const auto u0 = sine(128);
  primal::SolverOptions opts;
  std::size_t calls = 0;
  opts.on_iteration = [&](const primal::PrimalIterate&) { ++calls; };
  const auto res = primal::solve_primal(u0, g.T, g, opts);
  CHECK(calls == res.report.iterations);
  CHECK(res.report.converged);
  CHECK(std::abs(res.report.gap_history.back()) <= 2e-2);
  CHECK(res.report.reference_value ==
        doctest::Approx(shock_free::optimal_value_hj(antiderivative_zero_mean(u0), g.T)).epsilon(1e-14));
  check_run(res, u0, opts);
  CHECK(final_velocity_l1(res.iterate, u0) <= 5e-2);
}

TEST_CASE("flux constraint on a tightly converged run") {
  const SpaceTimeGrid g(128, 128, 0.5 * tstar);
  primal::SolverOptions opts;
  opts.tol = 1e-9;
  opts.max_iterations = 400;
  const auto res = primal::solve_primal(sine(128), g.T, g, opts);
  REQUIRE(res.report.residual_history.back() <= 1e-7);
  std::vector<double> a(g.cell_count());
  std::vector<double> b(g.cell_count());
  staggered::time_difference(g, res.iterate.W, a);
  staggered::space_difference(g, res.iterate.W, b);
  const auto vel = primal::extract_velocity(res.iterate, 1e-2);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    CHECK(b[c] <= 1 + 1e-6);
    if (!vel.vacuum[c]) CHECK(std::abs(vel.v[c] - a[c] / (1 - b[c])) <= 1e-6);
  }
}

TEST_CASE("sin data after the shock") {
  const SpaceTimeGrid g(128, 128, 2 * tstar);
  const auto u0 = sine(128);
  const primal::SolverOptions opts;
  const auto res = primal::solve_primal(u0, g.T, g, opts);
  CHECK(res.report.iterations <= 2000);
  CHECK(std::abs(res.report.gap_history.back()) <= 2e-2);
  check_run(res, u0, opts);
  CHECK(final_velocity_l1(res.iterate, u0) <= 5e-2);
  CHECK(velocity_vs_substitute(res.iterate, u0, 1e-2) <= 5e-2);
}

TEST_CASE("gap improves under refinement") {
  const auto gap = [](std::size_t n) {
    const SpaceTimeGrid g(n, n, 2 * tstar);
    primal::SolverOptions opts;
    opts.tol = 1e-4;
    return std::abs(primal::solve_primal(sine(n), g.T, g, opts).report.gap_history.back());
  };
  const double coarse = gap(64);
  const double fine = gap(256);
  MESSAGE("gap 64: " << coarse << "  gap 256: " << fine);
  CHECK(fine <= coarse);
}

TEST_CASE("checkpoint resume is bitwise identical") {
  const SpaceTimeGrid g(32, 24, 2 * tstar);
  const auto u0 = sine(32);
  primal::SolverOptions opts;
  opts.tol = 1e-12;
  opts.max_iterations = 60;
  const auto full = primal::solve_primal(u0, g.T, g, opts);

  opts.max_iterations = 25;
  const auto half = primal::solve_primal(u0, g.T, g, opts);
  const auto path = (std::filesystem::temp_directory_path() / "cb_checkpoint_test.bin").string();
  primal::save_checkpoint(path, half.iterate);
  const auto loaded = primal::load_checkpoint(path);
  std::filesystem::remove(path);
  CHECK(loaded.iteration == 25);
  CHECK(loaded.r == half.iterate.r);
  CHECK(loaded.rho == half.iterate.rho);
  CHECK(loaded.W == half.iterate.W);

  opts.max_iterations = 60;
  const auto resumed = primal::resume_primal(u0, loaded, opts);
  CHECK(resumed.iterate.iteration == 60);
  CHECK(resumed.iterate.rho == full.iterate.rho);
  CHECK(resumed.iterate.q == full.iterate.q);
  CHECK(resumed.iterate.W == full.iterate.W);
  CHECK(resumed.iterate.sigma_rho == full.iterate.sigma_rho);
  CHECK(resumed.iterate.r == full.iterate.r);
  CHECK(resumed.report.objective_history.back() == full.report.objective_history.back());
}
