#include "convexburgers/shock_free.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "convexburgers/errors.hpp"
#include "convexburgers/hopf_lax.hpp"

namespace convexburgers::shock_free {
namespace {

double reduce_unit(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;
  return r;
}

// Integral of |alpha - x| over [x0, x1].
double abs_integral(double alpha, double x0, double x1) {
  if (alpha <= x0) return 0.5 * ((x1 - alpha) * (x1 - alpha) - (x0 - alpha) * (x0 - alpha));
  if (alpha >= x1) return 0.5 * ((alpha - x0) * (alpha - x0) - (alpha - x1) * (alpha - x1));
  return 0.5 * ((alpha - x0) * (alpha - x0) + (x1 - alpha) * (x1 - alpha));
}

// Piecewise-linear periodic cumulative function through (position, mass
// midpoint) pairs, extended by F(x + 1) = F(x) + total.
class PeriodicCdf {
 public:
  explicit PeriodicCdf(std::vector<std::pair<double, double>> pos_weight) {
    std::sort(pos_weight.begin(), pos_weight.end());
    double acc = 0.0;
    for (const auto& [p, w] : pos_weight) {
      x_.push_back(p);
      f_.push_back(acc + 0.5 * w);
      acc += w;
    }
    total_ = acc;
    if (x_.empty()) return;
    x_.insert(x_.begin(), x_.back() - 1.0);
    f_.insert(f_.begin(), f_.back() - total_);
    x_.push_back(x_[1] + 1.0);
    f_.push_back(f_[1] + total_);
  }

  double operator()(double x) const {
    if (x_.empty()) return 0.0;
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t hi = std::clamp<std::size_t>(static_cast<std::size_t>(it - x_.begin()), 1, x_.size() - 1);
    const std::size_t lo = hi - 1;
    const double dx = x_[hi] - x_[lo];
    if (dx <= 0.0) return f_[hi];
    return f_[lo] + (f_[hi] - f_[lo]) * (x - x_[lo]) / dx;
  }

 private:
  std::vector<double> x_;
  std::vector<double> f_;
  double total_ = 0.0;
};

}  // namespace

double ParticleMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& p : particles) s += p.weight;
  return s;
}

SubstituteResult substitute(const SampledFn& phi0, double T) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw InvalidTime("shock_free::substitute: T must be positive and finite, got " + std::to_string(T));
  }
  const auto n = static_cast<std::ptrdiff_t>(phi0.size());
  const double h = phi0.spacing();
  const std::ptrdiff_t k = hopf_lax::candidate_shift_range(phi0, T);
  const std::ptrdiff_t first = -k * n;
  const std::ptrdiff_t last = (k + 1) * n;

  std::vector<double> g(static_cast<std::size_t>(last - first + 1));
  for (std::ptrdiff_t j = first; j <= last; ++j) {
    const double a = static_cast<double>(j) * h;
    g[static_cast<std::size_t>(j - first)] = 2.0 * T * phi0[j] + a * a;
  }
  const EnvelopeResult env = lower_convex_envelope(g, h);

  std::vector<double> phiT(static_cast<std::size_t>(n));
  std::vector<bool> omega(static_cast<std::size_t>(n));
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto s = static_cast<std::size_t>(i);
    const auto w = static_cast<std::size_t>(i - first);
    const double a = static_cast<double>(i) * h;
    phiT[s] = (env.hull_values[w] - a * a) / (2.0 * T);
    omega[s] = env.contact_mask[w];
  }
  SampledFn phi0T(phi0.grid, std::move(phiT));

  // Where contact is two-sided the hull and phi0 agree on the stencil and
  // phi0'' is used. At the edge of a gap the stencil reaches into the chord,
  // so the hull's one-sided slopes are used instead; this keeps the total
  // mass equal to the slope increment of the hull over one period.
  const SampledFn curvature = second_difference(phi0);
  const SampledFn hull_curvature = second_difference(phi0T);
  std::vector<double> rho0(static_cast<std::size_t>(n), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto s = static_cast<std::size_t>(i);
    if (!omega[s]) continue;
    const bool two_sided = omega[phi0.grid.wrap(i - 1)] && omega[phi0.grid.wrap(i + 1)];
    rho0[s] = 1.0 + T * (two_sided ? curvature.values[s] : hull_curvature.values[s]);
  }
  SampledFn u0T = derivative(phi0T);
  return SubstituteResult{T, phi0, std::move(phi0T), std::move(u0T), std::move(omega),
                          SampledFn(phi0.grid, std::move(rho0))};
}

double no_shock_margin(const SubstituteResult& sub) {
  const SampledFn slope = second_difference(sub.phi0T);
  double margin = 1.0;
  for (double s : slope.values) margin = std::min(margin, 1.0 + sub.T * s);
  return margin;
}

ParticleMeasure pushforward(const SubstituteResult& sub, double t) {
  if (!(t >= 0.0 && t <= sub.T)) {
    throw TimeOutOfRange("shock_free::pushforward: t = " + std::to_string(t) + " outside [0, " +
                         std::to_string(sub.T) + "]");
  }
  const SampledFn velocity = derivative_fourth_order(sub.phi0);
  const double h = sub.phi0.spacing();
  ParticleMeasure out{t, {}};
  for (std::size_t i = 0; i < sub.omega.size(); ++i) {
    if (!sub.omega[i]) continue;
    const double a = static_cast<double>(i) * h;
    const double v = velocity.values[i];
    out.particles.push_back({a, reduce_unit(a + t * v), sub.rho0.values[i] * h, v});
  }
  return out;
}

double wasserstein1_to_uniform(const ParticleMeasure& measure) {
  const double total = measure.total_mass();
  if (!(total > 0.0)) throw InvalidArgument("wasserstein1_to_uniform: measure has no mass");
  std::vector<std::pair<double, double>> pw;
  pw.reserve(measure.particles.size());
  for (const auto& p : measure.particles) pw.emplace_back(p.position, p.weight / total);
  std::sort(pw.begin(), pw.end());

  // F is a step function: level[k] on [edge[k], edge[k+1]).
  std::vector<double> edge{0.0};
  std::vector<double> level{0.0};
  double acc = 0.0;
  for (const auto& [p, w] : pw) {
    acc += w;
    edge.push_back(p);
    level.push_back(acc);
  }
  edge.push_back(1.0);

  // On the circle W1 = min_c integral |F(x) - x - c| dx; the minimizer is a
  // median of F(x) - x under Lebesgue measure.
  const auto below = [&](double c) {
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < edge.size(); ++k) {
      const double x0 = edge[k];
      const double x1 = edge[k + 1];
      if (x1 <= x0) continue;
      // level - x <= c  <=>  x >= level - c
      const double from = std::max(x0, level[k] - c);
      m += std::max(0.0, x1 - from);
    }
    return m;
  };
  double lo = -2.0;
  double hi = 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (below(mid) < 0.5 ? lo : hi) = mid;
  }
  const double c = 0.5 * (lo + hi);
  double w1 = 0.0;
  for (std::size_t k = 0; k + 1 < edge.size(); ++k) {
    if (edge[k + 1] <= edge[k]) continue;
    w1 += abs_integral(level[k] - c, edge[k], edge[k + 1]);
  }
  return w1;
}

BinnedMeasure bin_to_cells(const ParticleMeasure& measure, std::size_t n) {
  std::vector<std::pair<double, double>> mass;
  std::vector<std::pair<double, double>> momentum;
  for (const auto& p : measure.particles) {
    mass.emplace_back(p.position, p.weight);
    momentum.emplace_back(p.position, p.weight * p.velocity);
  }
  const PeriodicCdf fm(std::move(mass));
  const PeriodicCdf fq(std::move(momentum));
  const double h = 1.0 / static_cast<double>(n);
  BinnedMeasure out{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = static_cast<double>(i) * h;
    const double x1 = static_cast<double>(i + 1) * h;
    out.rho[i] = (fm(x1) - fm(x0)) / h;
    out.q[i] = (fq(x1) - fq(x0)) / h;
  }
  return out;
}

double optimal_value_hj(const SampledFn& phi0, double T) {
  const auto sol = hopf_lax::solve(phi0, T);
  return -quadrature(sol.phi);
}

double optimal_value_contact(const SubstituteResult& sub) {
  const SampledFn velocity = derivative_fourth_order(sub.phi0);
  double integral = 0.0;
  for (std::size_t i = 0; i < sub.omega.size(); ++i) {
    if (!sub.omega[i]) continue;
    const double v = velocity.values[i];
    integral += (sub.phi0.values[i] + 0.5 * sub.T * v * v) * sub.rho0.values[i];
  }
  return -integral * sub.phi0.spacing();
}

}  // namespace convexburgers::shock_free
