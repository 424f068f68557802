// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "convexburgers/duality.hpp"
#include "convexburgers/fv_oracle.hpp"
#include "convexburgers/hopf_lax.hpp"
#include "convexburgers/initial_data.hpp"
#include "convexburgers/primal_solver.hpp"
#include "convexburgers/shock_free.hpp"
#include "oracles.hpp"

using namespace convexburgers;
using oracle::pi;

namespace {

const double tstar = 1.0 / (2 * pi);

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

SampledFn sine(std::size_t n) {
  return SampledFn::sample(PeriodicGrid(n), [](double x) { return std::sin(2 * pi * x); });
}

SampledFn trig_case(std::size_t n, std::uint64_t seed) {
  return initial_data::random_trig(PeriodicGrid(n), seed, 1 + static_cast<int>(seed % 5));
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* name, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = Clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " exception: " << e.what();
  }
  const double secs = seconds_since(start);
  if (!out.pass) ++failures;
  std::printf("%s %d %s:%s (%.2f s)\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.str().c_str(), secs);
  std::fflush(stdout);
}

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

}  // namespace

int main() {
  criterion(1, "duality identity", [](Outcome& o) {
    const auto phi0 = antiderivative_zero_mean(sine(4096));
    for (double f : {0.5, 2.0, 5.0}) {
      const auto start = Clock::now();
      const double T = f * tstar;
      const double hj = shock_free::optimal_value_hj(phi0, T);
      const double contact = shock_free::optimal_value_contact(shock_free::substitute(phi0, T));
      const double rel = std::abs(hj - contact) / std::abs(hj);
      const double secs = seconds_since(start);
      o.detail << " T/T*=" << f << " rel " << rel << " in " << secs << " s;";
      o.require(rel <= 1e-5, "relative gap <= 1e-5");
      o.require(secs <= 5.0, "runtime <= 5 s");
    }
  });

  criterion(2, "shock time", [](Outcome& o) {
    const double ts = hopf_lax::shock_time(antiderivative_zero_mean(sine(4096)));
    o.detail << " sin T* error " << std::abs(ts - tstar) << ";";
    o.require(std::abs(ts - tstar) <= 1e-4, "sin T* within 1e-4");
    int ok = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto phi0 = antiderivative_zero_mean(trig_case(4096, seed));
      const double t = hopf_lax::shock_time(phi0);
      const bool before = hopf_lax::smooth_characteristics_check(phi0, 0.95 * t);
      const bool after = hopf_lax::smooth_characteristics_check(phi0, 1.05 * t);
      if (before && !after) ++ok;
    }
    o.detail << " random data bracketed " << ok << "/20";
    o.require(ok == 20, "all 20 random cases bracket T*");
  });

  // criteria 3 and 4 share the data
  struct SubstituteCase {
    std::string name;
    SampledFn phi0;
    double T;
  };
  std::vector<SubstituteCase> cases;
  cases.push_back({"sin", antiderivative_zero_mean(sine(4096)), 2 * tstar});
  for (std::uint64_t seed = 31; seed <= 40; ++seed) {
    auto phi0 = antiderivative_zero_mean(trig_case(4096, seed));
    const double T = 1.5 * hopf_lax::shock_time(phi0);
    cases.push_back({"seed " + std::to_string(seed), std::move(phi0), T});
  }

  criterion(3, "substitute", [&](Outcome& o) {
    double worst_l1 = 0.0;
    double worst_margin = 1.0;
    for (const auto& c : cases) {
      const auto sub = shock_free::substitute(c.phi0, c.T);
      const double l1 = l1_distance(hopf_lax::solve(sub.phi0T, c.T).u, hopf_lax::solve(c.phi0, c.T).u);
      const double margin = shock_free::no_shock_margin(sub);
      worst_l1 = std::max(worst_l1, l1);
      worst_margin = std::min(worst_margin, margin);
      o.require(l1 <= 5e-3, c.name + " L1 <= 5e-3");
      o.require(margin >= -1e-6, c.name + " no-shock margin >= -1e-6");
    }
    o.detail << " worst L1 " << worst_l1 << ", worst margin " << worst_margin << " over " << cases.size() << " cases";
  });

  criterion(4, "pushforward endpoint", [&](Outcome& o) {
    double worst = 0.0;
    for (const auto& c : cases) {
      const auto sub = shock_free::substitute(c.phi0, c.T);
      const double w1 = shock_free::wasserstein1_to_uniform(shock_free::pushforward(sub, c.T));
      const double n = static_cast<double>(c.phi0.size());
      worst = std::max(worst, w1 * n);
      o.require(w1 <= 2.0 / n, c.name + " W1 <= 2/n");
    }
    o.detail << " worst W1 * n " << worst;
  });

  criterion(5, "candidate maximizer recovery", [](Outcome& o) {
    const SpaceTimeGrid g(1024, 1024, 0.5 * tstar);
    const BurgersSystem burgers;
    const auto u0f = [](double x) { return std::sin(2 * pi * x); };
    StateField U(g, 1);
    std::vector<double> e(g.nt + 1, 0.0);
    for (std::size_t k = 0; k <= g.nt; ++k) {
      for (std::size_t i = 0; i < g.n; ++i) {
        const double u = oracle::characteristic_solution(u0f, g.time(k), static_cast<double>(i) * g.dx(), 1.0);
        U.set(k, i, vec1(u));
        e[k] += 0.5 * u * u * g.dx();
      }
    }
    double entropy = 0.0;
    for (std::size_t k = 0; k < g.nt; ++k) entropy += 0.5 * (e[k] + e[k + 1]) * g.dt();

    const auto report = criterion_check(burgers, U, {vec1(0.0)});
    o.detail << " criterion min eigenvalue " << report.min_eigenvalue << ";";
    o.require(report.pass, "criterion passes");

    const auto W = theorem1_W(burgers, U);
    const auto u0 = sine(g.n);
    const double J = objective(burgers, W, u0);
    const double rel = std::abs(J - entropy) / entropy;
    o.detail << " objective vs entropy integral rel " << rel << ";";
    o.require(rel <= 1e-4, "objective equals the entropy integral within 1e-4");

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> c(-1, 1);
    int decreased = 0;
    double smallest_drop = 1.0;
    for (int p = 0; p < 10; ++p) {
      DualField P = W;
      const double a1 = c(rng), b1 = c(rng), a2 = c(rng), b2 = c(rng), s = c(rng);
      for (std::size_t k = 0; k < g.nt; ++k) {
        const double tau = 1 - g.time(k) / g.T;
        for (std::size_t i = 0; i < g.n; ++i) {
          const double x = static_cast<double>(i) * g.dx();
          P(k, i) += 0.004 * tau * (1 + s * tau) *
                     (a1 * std::sin(2 * pi * x) + b1 * std::cos(2 * pi * x) + a2 * std::sin(4 * pi * x) +
                      b2 * std::cos(4 * pi * x));
        }
      }
      const double drop = J - objective(burgers, P, u0);
      smallest_drop = std::min(smallest_drop, drop);
      if (drop > 0.0) ++decreased;
    }
    o.detail << " perturbations decreased " << decreased << "/10 (smallest drop " << smallest_drop << ")";
    o.require(decreased == 10, "all perturbations decrease the objective");
  });

  criterion(6, "primal solver gap", [](Outcome& o) {
    for (double f : {0.5, 2.0}) {
      const auto start = Clock::now();
      const SpaceTimeGrid g(128, 128, f * tstar);
      const auto u0 = sine(128);
      const auto res = primal::solve_primal(u0, g.T, g);
      const double secs = seconds_since(start);
      const double gap = std::abs(res.report.gap_history.back());
      const auto vel = primal::extract_velocity(res.iterate, 1e-3);
      const auto uT = staggered::to_cell_midpoints(hopf_lax::solve(antiderivative_zero_mean(u0), g.T).u.values);
      double l1 = 0.0;
      for (std::size_t i = 0; i < g.n; ++i) l1 += std::abs(vel.v[(g.nt - 1) * g.n + i] - uT[i]) * g.dx();
      o.detail << " T/T*=" << f << " gap " << gap << " after " << res.report.iterations << " iterations, v(T) L1 "
               << l1 << ", " << secs << " s;";
      o.require(gap <= 2e-2, "relative gap <= 2e-2");
      o.require(res.report.iterations <= 2000, "at most 2000 iterations");
      o.require(secs <= 120.0, "at most 120 s");
      o.require(l1 <= 5e-2, "v(T) L1 <= 5e-2");
    }
  });

  criterion(7, "value bounds", [](Outcome& o) {
    int checked = 0;
    for (std::uint64_t seed = 51; seed <= 70; ++seed) {
      const auto u0 = trig_case(2048, seed);
      const auto phi0 = antiderivative_zero_mean(u0);
      const double ts = hopf_lax::shock_time(phi0);
      for (double f : {0.5, 2.0, 5.0}) {
        const double T = f * ts;
        const double J = shock_free::optimal_value_hj(phi0, T);
        const double upper = T * u0.max_abs() * u0.max_abs() / 2;
        o.require(J >= 0.0 && J <= upper, "seed " + std::to_string(seed) + " bounds");
        ++checked;
      }
    }
    o.detail << " " << checked << " (data, T) pairs";
  });

  criterion(8, "godunov cross-check", [](Outcome& o) {
    for (double f : {0.5, 1.0, 1.5, 2.0}) {
      const double T = f * tstar;
      double prev = 0.0;
      o.detail << " T/T*=" << f << " L1";
      for (std::size_t n = 512; n <= 4096; n *= 2) {
        const auto u0 = sine(n);
        const auto fv_u = fv::advance({u0, 0.0, 0.9}, T).u;
        const double err = l1_distance(fv_u, hopf_lax::solve(antiderivative_zero_mean(u0), T).u);
        o.detail << " " << err;
        if (prev > 0.0) {
          const double ratio = prev / err;
          o.require(ratio >= 1.5 && ratio <= 3.0, "error ratio in [1.5, 3] at n=" + std::to_string(n));
        }
        if (n == 4096) o.require(err <= 5e-3, "L1 <= 5e-3 at n=4096");
        prev = err;
      }
      o.detail << ";";
    }
  });

  criterion(9, "conjugate consistency", [](Outcome& o) {
    const BurgersSystem burgers;
    double worst = 0.0;
    int mismatched = 0;
    for (int a = 0; a <= 40; ++a) {
      for (int b = 0; b <= 40; ++b) {
        const double A = -2.0 + 4.0 * a / 40;
        const double B = -2.0 + 2.9 * b / 40;
        const double exact = burgers_K(A, B);
        const double numeric = conjugate_K(burgers, vec1(A), vec1(B));
        if (std::isfinite(exact) != std::isfinite(numeric)) ++mismatched;
        else if (std::isfinite(exact)) worst = std::max(worst, std::abs(exact - numeric));
      }
    }
    o.detail << " worst |K - K_burgers| " << worst << ", finiteness mismatches " << mismatched << ";";
    o.require(worst <= 1e-8, "agreement within 1e-8");
    o.require(mismatched == 0, "finiteness agrees");

    const IsothermalEulerSystem euler;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ur(0.1, 10);
    std::uniform_real_distribution<double> uq(-10, 10);
    double sym = 0.0;
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd v(2);
      v << ur(rng), uq(rng);
      sym = std::max(sym, symmetry_residual(euler, v));
    }
    o.detail << " euler symmetry residual " << sym;
    o.require(sym <= 1e-8, "symmetry residual <= 1e-8");
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
