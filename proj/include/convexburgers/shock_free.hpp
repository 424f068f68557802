#pragma once

#include <cstddef>
#include <vector>

#include "convexburgers/periodic.hpp"

namespace convexburgers::shock_free {

/// Convexified initial data on [0, T] and its contact set.
struct SubstituteResult {
  double T;
  /// Original potential phi0.
  SampledFn phi0;
  /// Potential whose parabola-shifted graph a^2 + 2T phi is the convex hull
  /// of a^2 + 2T phi0.
  SampledFn phi0T;
  /// Substitute initial data, centered difference of phi0T.
  SampledFn u0T;
  /// Nodes where a^2 + 2T phi0 touches its hull.
  std::vector<bool> omega;
  /// 1 + T phi0'' on omega, zero elsewhere. At the edges of a gap of
  /// omega the hull's one-sided slopes replace phi0''.
  SampledFn rho0;
};

struct Particle {
  double a;         // label, a node in omega
  double position;  // a + t v, reduced to [0, 1)
  double weight;    // rho0(a) h
  double velocity;  // phi0'(a), constant along the characteristic
};

/// Node-sampled representation of rho(t) and of q(t) = v rho(t).
struct ParticleMeasure {
  double t;
  std::vector<Particle> particles;

  double total_mass() const;
};

/// Throws InvalidTime if T <= 0.
SubstituteResult substitute(const SampledFn& phi0, double T);

/// min over nodes and t in [0, T) of 1 + t (u0T)', with (u0T)' taken as the
/// second difference of phi0T. Non-negative (up to round-off) iff the
/// substitute stays shock-free on [0, T).
double no_shock_margin(const SubstituteResult& sub);

/// Particles a + t phi0'(a) for a in omega. Throws TimeOutOfRange unless 0 <= t <= T.
ParticleMeasure pushforward(const SubstituteResult& sub, double t);

/// Exact 1-D Wasserstein-1 distance on the circle between the (mass
/// normalized) particle measure and the Lebesgue measure.
double wasserstein1_to_uniform(const ParticleMeasure& measure);

/// Cell averages of rho(t) and q(t) on the cells [i/n, (i+1)/n), obtained
/// from the piecewise-linear cumulative distribution of the particles.
struct BinnedMeasure {
  std::vector<double> rho;
  std::vector<double> q;
};
BinnedMeasure bin_to_cells(const ParticleMeasure& measure, std::size_t n);

/// J = -integral of phi(T, x) dx with phi the Hopf-Lax potential.
double optimal_value_hj(const SampledFn& phi0, double T);

/// J = -sum over omega of (phi0 + T/2 phi0'^2) rho0 h.
double optimal_value_contact(const SubstituteResult& sub);

}  // namespace convexburgers::shock_free
