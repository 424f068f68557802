#pragma once

#include <cstddef>
#include <vector>

#include "convexburgers/periodic.hpp"

namespace convexburgers::hopf_lax {

/// Entropy solution of periodic Burgers at time t, with its potential and
/// the minimizer a(x) of phi0(a) + |a - x|^2 / 2t at every node.
struct HopfLaxSolution {
  double t;
  SampledFn phi;
  SampledFn u;
  /// Unwrapped minimizer positions (integer shifts included).
  std::vector<double> argmin;
  /// Unwrapped grid index of the discrete minimizer before refinement.
  std::vector<std::ptrdiff_t> argmin_index;
};

struct SolveOptions {
  /// Quadratic sub-grid refinement around each discrete minimizer.
  bool refine = true;
  /// Number of independent x-chunks; 0 means max_threads().
  std::size_t chunks = 0;
};

/// Number of periodic replicas K on each side that can contain a minimizer:
/// ceil(t * sup|phi0'|) + 1.
std::ptrdiff_t candidate_shift_range(const SampledFn& phi0, double t);

/// Objective phi0(a_j) + (a_j - x_i)^2 / 2t for unwrapped candidate j and node i.
inline double candidate_cost(const SampledFn& phi0, double t, std::ptrdiff_t j, std::ptrdiff_t i) {
  const double d = static_cast<double>(j - i) * phi0.spacing();
  return phi0[j] + d * d / (2.0 * t);
}

/// Hopf-Lax minimization at every node. u is the centered difference of
/// phi, which agrees with (x - a(x)) / t away from shocks.
///
/// The smallest minimizer is nondecreasing in x (the quadratic cost is a
/// Monge array), so minimizers are located by divide and conquer over the
/// candidate range, O((n + K n) log n) work in total.
///
/// Throws InvalidTime if t <= 0.
HopfLaxSolution solve(const SampledFn& phi0, double t, const SolveOptions& opts = {});

/// First time a shock forms: inf 1 / max(-phi0'', 0) over nodes, using
/// centered second differences. Returns +inf when phi0'' >= 0 everywhere.
double shock_time(const SampledFn& phi0);

/// Integral of u^2 / 2 over the torus.
double entropy_total(const HopfLaxSolution& sol);

struct PointMinimum {
  std::ptrdiff_t index;  // unwrapped candidate index
  double value;
};

/// Exhaustive minimization at an arbitrary (off-grid) point x over the
/// candidates that can satisfy the first-order condition |a - x| <= t sup|u0|.
PointMinimum minimize_at(const SampledFn& phi0, double t, double x);

/// True when every node a is the unique minimizer at its own characteristic
/// foot x = a + t u0(a), i.e. no characteristic has entered a shock by time t.
bool smooth_characteristics_check(const SampledFn& phi0, double t);

}  // namespace convexburgers::hopf_lax
