#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace convexburgers {

/// Uniform grid on the unit torus R/Z with nodes x_i = i/n.
class PeriodicGrid {
 public:
  explicit PeriodicGrid(std::size_t n);

  std::size_t size() const { return n_; }
  double spacing() const { return 1.0 / static_cast<double>(n_); }
  double node(std::ptrdiff_t i) const { return static_cast<double>(i) * spacing(); }

  /// Maps any integer index onto [0, n).
  std::size_t wrap(std::ptrdiff_t i) const;

  bool operator==(const PeriodicGrid&) const = default;

 private:
  std::size_t n_;
};

/// Samples of a periodic function at the nodes of a PeriodicGrid.
struct SampledFn {
  PeriodicGrid grid;
  std::vector<double> values;

  SampledFn(PeriodicGrid g, std::vector<double> v);

  static SampledFn zeros(PeriodicGrid g);
  static SampledFn sample(PeriodicGrid g, const std::function<double(double)>& f);

  std::size_t size() const { return values.size(); }
  double spacing() const { return grid.spacing(); }

  /// Periodic access: index i refers to node i mod n.
  double operator[](std::ptrdiff_t i) const { return values[grid.wrap(i)]; }

  double mean() const;
  double max_abs() const;
};

struct EnvelopeResult {
  std::vector<double> hull_values;
  std::vector<bool> contact_mask;
};

/// Tolerance on |mean(u0)| accepted by antiderivative_zero_mean.
double mean_tolerance(const SampledFn& u0);

/// Periodic antiderivative with zero mean.
///
/// Cumulative trapezoid sums with the Euler-Maclaurin end correction
/// -h^2/12 (u'(x) - u'(0)), which makes the construction fourth-order
/// accurate while staying exactly periodic. The residual drift left by a
/// mean that is zero only up to round-off is removed linearly.
///
/// Throws NonZeroMean when |mean(u0)| exceeds mean_tolerance(u0).
SampledFn antiderivative_zero_mean(const SampledFn& u0);

/// Greatest discretely convex minorant of the points (i * spacing, values[i]).
///
/// Monotone-chain lower hull, interpolated linearly between hull vertices.
/// A point is in contact when it is a hull vertex or lies within
/// 1e-9 * (max - min) of the hull.
EnvelopeResult lower_convex_envelope(std::span<const double> values, double spacing);

/// Centered difference (f[i+1] - f[i-1]) / 2h with periodic wrap.
SampledFn derivative(const SampledFn& f);

/// Five-point centered difference, fourth-order accurate.
SampledFn derivative_fourth_order(const SampledFn& f);

/// Centered second difference (f[i+1] - 2 f[i] + f[i-1]) / h^2.
SampledFn second_difference(const SampledFn& f);

/// h * sum(values): exact for trigonometric polynomials of degree < n.
double quadrature(const SampledFn& f);

/// h * sum |f - g| on a common grid.
double l1_distance(const SampledFn& f, const SampledFn& g);

/// max |f - g| on a common grid.
double max_distance(const SampledFn& f, const SampledFn& g);

}  // namespace convexburgers
