#include "convexburgers/fv_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "convexburgers/errors.hpp"

namespace convexburgers::fv {

double godunov_flux(double uL, double uR) {
  const double l = std::max(uL, 0.0);
  const double r = std::min(uR, 0.0);
  return std::max(0.5 * l * l, 0.5 * r * r);
}

void step(SampledFn& u, double dt) {
  const std::size_t n = u.size();
  const double ratio = dt / u.spacing();
  // flux[i] sits on the interface between cells i and i+1
  std::vector<double> flux(n);
  for (std::size_t i = 0; i < n; ++i) flux[i] = godunov_flux(u.values[i], u.values[(i + 1) % n]);
  for (std::size_t i = 0; i < n; ++i) u.values[i] -= ratio * (flux[i] - flux[(i + n - 1) % n]);
}

double stable_step(const SampledFn& u, double cfl) { return cfl * u.spacing() / std::max(u.max_abs(), 1e-12); }

FvState advance(FvState state, double tEnd, const std::function<void(const FvState&)>& on_step) {
  if (!(tEnd >= state.t)) {
    throw InvalidTime("fv::advance: tEnd = " + std::to_string(tEnd) + " is before t = " + std::to_string(state.t));
  }
  if (!(state.cfl > 0.0 && state.cfl <= 1.0)) throw BadOptions("fv::advance: cfl must lie in (0, 1]");
  while (state.t < tEnd) {
    double dt = stable_step(state.u, state.cfl);
    bool last = false;
    if (state.t + dt >= tEnd) {
      dt = tEnd - state.t;
      last = true;
    }
    step(state.u, dt);
    state.t = last ? tEnd : state.t + dt;
    if (on_step) on_step(state);
  }
  return state;
}

double total_variation(const SampledFn& u) {
  double tv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) tv += std::abs(u.values[(i + 1) % u.size()] - u.values[i]);
  return tv;
}

}  // namespace convexburgers::fv
