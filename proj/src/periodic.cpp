#include "convexburgers/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "convexburgers/errors.hpp"

namespace convexburgers {

PeriodicGrid::PeriodicGrid(std::size_t n) : n_(n) {
  if (n < 2) throw InvalidArgument("PeriodicGrid needs at least 2 cells, got " + std::to_string(n));
}

std::size_t PeriodicGrid::wrap(std::ptrdiff_t i) const {
  const auto n = static_cast<std::ptrdiff_t>(n_);
  std::ptrdiff_t r = i % n;
  if (r < 0) r += n;
  return static_cast<std::size_t>(r);
}

SampledFn::SampledFn(PeriodicGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw InvalidArgument("SampledFn: " + std::to_string(values.size()) + " samples on a grid of " +
                          std::to_string(grid.size()) + " nodes");
  }
}

SampledFn SampledFn::zeros(PeriodicGrid g) { return SampledFn(g, std::vector<double>(g.size(), 0.0)); }

SampledFn SampledFn::sample(PeriodicGrid g, const std::function<double(double)>& f) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g.node(static_cast<std::ptrdiff_t>(i)));
  return SampledFn(g, std::move(v));
}

double SampledFn::mean() const {
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double SampledFn::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double mean_tolerance(const SampledFn& u0) { return 1e-10 * std::max(1.0, u0.max_abs()); }

SampledFn antiderivative_zero_mean(const SampledFn& u0) {
  const double mean = u0.mean();
  if (std::abs(mean) > mean_tolerance(u0)) {
    throw NonZeroMean("antiderivative_zero_mean: mean(u0) = " + std::to_string(mean) +
                      "; subtract the mean (Galilean normalization) first");
  }
  const std::size_t n = u0.size();
  const double h = u0.spacing();
  const SampledFn du = derivative_fourth_order(u0);

  std::vector<double> phi(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::ptrdiff_t>(i);
    phi[i + 1] = phi[i] + 0.5 * h * (u0[j] + u0[j + 1]) - h * h / 12.0 * (du[j + 1] - du[j]);
  }
  // phi[n] must vanish for an exactly zero-mean input.
  const double drift = phi[n];
  for (std::size_t i = 0; i <= n; ++i) phi[i] -= drift * static_cast<double>(i) / static_cast<double>(n);
  phi.pop_back();

  SampledFn out(u0.grid, std::move(phi));
  const double m = out.mean();
  for (double& v : out.values) v -= m;
  return out;
}

EnvelopeResult lower_convex_envelope(std::span<const double> values, double spacing) {
  const std::size_t m = values.size();
  if (m < 2) throw InvalidArgument("lower_convex_envelope needs at least 2 values");
  if (!(spacing > 0.0)) throw InvalidArgument("lower_convex_envelope: spacing must be positive");

  // Abscissae are equispaced, so orientation tests can use integer indices.
  std::vector<std::size_t> hull;
  hull.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    while (hull.size() >= 2) {
      const std::size_t o = hull[hull.size() - 2];
      const std::size_t a = hull.back();
      const double cross = static_cast<double>(a - o) * (values[i] - values[o]) -
                           (values[a] - values[o]) * static_cast<double>(i - o);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(i);
  }

  EnvelopeResult out;
  out.hull_values.assign(m, 0.0);
  out.contact_mask.assign(m, false);
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    const std::size_t a = hull[k];
    const std::size_t b = hull[k + 1];
    const double slope = (values[b] - values[a]) / static_cast<double>(b - a);
    for (std::size_t i = a; i < b; ++i) out.hull_values[i] = values[a] + slope * static_cast<double>(i - a);
  }
  out.hull_values[m - 1] = values[m - 1];

  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double tol = 1e-9 * (*hi - *lo);
  for (std::size_t v : hull) out.contact_mask[v] = true;
  for (std::size_t i = 0; i < m; ++i) {
    out.hull_values[i] = std::min(out.hull_values[i], values[i]);
    if (values[i] - out.hull_values[i] <= tol) out.contact_mask[i] = true;
  }
  return out;
}

SampledFn derivative(const SampledFn& f) {
  const double inv = 0.5 / f.spacing();
  std::vector<double> d(f.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto j = static_cast<std::ptrdiff_t>(i);
    d[i] = (f[j + 1] - f[j - 1]) * inv;
  }
  return SampledFn(f.grid, std::move(d));
}

SampledFn derivative_fourth_order(const SampledFn& f) {
  const double inv = 1.0 / (12.0 * f.spacing());
  std::vector<double> d(f.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto j = static_cast<std::ptrdiff_t>(i);
    d[i] = (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) * inv;
  }
  return SampledFn(f.grid, std::move(d));
}

SampledFn second_difference(const SampledFn& f) {
  const double h = f.spacing();
  const double inv = 1.0 / (h * h);
  std::vector<double> d(f.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto j = static_cast<std::ptrdiff_t>(i);
    d[i] = (f[j + 1] - 2.0 * f[j] + f[j - 1]) * inv;
  }
  return SampledFn(f.grid, std::move(d));
}

double quadrature(const SampledFn& f) {
  return f.spacing() * std::accumulate(f.values.begin(), f.values.end(), 0.0);
}

double l1_distance(const SampledFn& f, const SampledFn& g) {
  if (!(f.grid == g.grid)) throw InvalidArgument("l1_distance: grids differ");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::abs(f.values[i] - g.values[i]);
  return s * f.spacing();
}

double max_distance(const SampledFn& f, const SampledFn& g) {
  if (!(f.grid == g.grid)) throw InvalidArgument("max_distance: grids differ");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s = std::max(s, std::abs(f.values[i] - g.values[i]));
  return s;
}

}  // namespace convexburgers
