#pragma once

#include <cstddef>
#include <functional>

#include "convexburgers/periodic.hpp"

namespace convexburgers::fv {

/// Cell averages of u on the cells centered at the nodes of a PeriodicGrid.
struct FvState {
  SampledFn u;
  double t = 0.0;
  double cfl = 0.9;
};

/// Exact Riemann flux for f(u) = u^2/2.
double godunov_flux(double uL, double uR);

/// One forward Euler step of size dt.
void step(SampledFn& u, double dt);

/// Largest stable step cfl * h / max(|u|, 1e-12).
double stable_step(const SampledFn& u, double cfl);

/// Steps until tEnd, the last step truncated. on_step (optional) sees the
/// state after every step. Throws InvalidTime if tEnd < state.t.
FvState advance(FvState state, double tEnd, const std::function<void(const FvState&)>& on_step = {});

/// sum |u[i+1] - u[i]| with periodic wrap.
double total_variation(const SampledFn& u);

}  // namespace convexburgers::fv
