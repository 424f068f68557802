#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "convexburgers/periodic.hpp"
#include "convexburgers/shock_free.hpp"
#include "convexburgers/staggered.hpp"

namespace convexburgers::primal {

/// Current state of the augmented-Lagrangian iteration.
///
/// (rho, q) are cell fields, W and the multipliers sigma are the node and
/// cell fields of the splitting Y = (1 - d_x W, d_t W).
struct PrimalIterate {
  SpaceTimeGrid grid;
  std::vector<double> rho;
  std::vector<double> q;
  std::vector<double> W;
  std::vector<double> sigma_rho;
  std::vector<double> sigma_q;
  double r = 1.0;
  std::size_t iteration = 0;
  /// Consecutive iterations whose objective decreased by more than 1e-6.
  std::size_t decrease_run = 0;

  explicit PrimalIterate(const SpaceTimeGrid& g);
};

struct SolverOptions {
  double r = 1.0;
  bool adaptive_r = true;
  double tol = 1e-3;
  std::size_t max_iterations = 2000;
  /// Analytic optimum; NaN means optimal_value_hj of u0's potential.
  double reference_value = std::numeric_limits<double>::quiet_NaN();
  /// Number of consecutive decreasing iterations that counts as divergence.
  std::size_t divergence_window = 50;
  std::size_t burn_in = 10;
  /// Called after every iteration.
  std::function<void(const PrimalIterate&)> on_iteration;
};

struct SolverReport {
  std::vector<double> objective_history;
  std::vector<double> gap_history;
  std::vector<double> residual_history;
  std::size_t iterations = 0;
  bool converged = false;
  double reference_value = 0.0;
  std::vector<std::string> warnings;
};

struct PrimalResult {
  PrimalIterate iterate;
  SolverReport report;
};

/// Maximizes sum (-q^2/2rho + q u0) h dt over (rho, q) subject to the
/// discrete continuity equation and rho(T) = 1.
///
/// Alternates a direct solve of the normal equations for W, the pointwise
/// prox of q^2/2rho (an exact projection onto {a + b^2/2 <= 0}), and the
/// multiplier update. Stops when |gap| <= tol and the continuity residual
/// is <= 10 tol, or after max_iterations.
///
/// Throws BadOptions (r <= 0, tol <= 0), InvalidTime (T <= 0 or T differs
/// from grid.T), NonZeroMean, Diverged.
PrimalResult solve_primal(const SampledFn& u0, double T, const SpaceTimeGrid& grid, const SolverOptions& opts = {});

/// Continues from a saved iterate; the trajectory is identical to one
/// uninterrupted run.
PrimalResult resume_primal(const SampledFn& u0, PrimalIterate start, const SolverOptions& opts = {});

/// sum (-q^2/2rho + q u0) h dt with 0/0 = 0; -inf when some cell has
/// q != 0 and rho <= 0.
double primal_objective(const SpaceTimeGrid& grid, const std::vector<double>& rho, const std::vector<double>& q,
                        const SampledFn& u0);

/// Discrete divergence d_t rho + d_x q at the interior nodes (the exact
/// adjoint stencil of the box differences), L2 in space-time, plus the L2
/// norm of rho(T) - 1, where rho(T) is continued from the last slab.
double continuity_residual(const SpaceTimeGrid& grid, const std::vector<double>& rho, const std::vector<double>& q);
double continuity_residual(const PrimalIterate& it);

struct VelocityField {
  std::vector<double> v;
  /// Cells with rho < floor; v is reported there but not trusted.
  std::vector<bool> vacuum;
};

VelocityField extract_velocity(const PrimalIterate& it, double rho_floor);

/// The exact measure solution (pushforward of the substitute) on the grid:
/// W is its potential x - (mass of labels left of x) at the nodes, rho and q
/// the box differences 1 - d_x W and d_t W, i.e. cell averages of the exact
/// density and momentum (exact in one direction, trapezoid in the other).
/// Satisfies the discrete constraint to round-off.
PrimalIterate iterate_from_substitute(const shock_free::SubstituteResult& sub, std::size_t nt);

/// JSON header line {n, nt, T, iteration, r, decrease_run} followed by the raw
/// doubles of rho, q, W, sigma_rho, sigma_q.
void save_checkpoint(const std::string& path, const PrimalIterate& it);
PrimalIterate load_checkpoint(const std::string& path);

/// Pointwise prox of q^2/2rho - c q with step 1/r at (y_rho, y_q).
/// rho >= 0 by construction.
struct ProxResult {
  double rho;
  double q;
};
ProxResult prox_kinetic(double y_rho, double y_q, double c, double r);

}  // namespace convexburgers::primal
