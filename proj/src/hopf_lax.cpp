#include "convexburgers/hopf_lax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "convexburgers/errors.hpp"
#include "convexburgers/parallel.hpp"

namespace convexburgers::hopf_lax {
namespace {

void require_positive_time(double t, const char* where) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw InvalidTime(std::string(where) + ": time must be positive and finite, got " + std::to_string(t));
  }
}

struct Candidate {
  std::ptrdiff_t index;
  double value;
};

// Smallest minimizer over j in [jlo, jhi] for node i.
Candidate scan(const SampledFn& phi0, double t, std::ptrdiff_t i, std::ptrdiff_t jlo, std::ptrdiff_t jhi) {
  Candidate best{jlo, candidate_cost(phi0, t, jlo, i)};
  for (std::ptrdiff_t j = jlo + 1; j <= jhi; ++j) {
    const double c = candidate_cost(phi0, t, j, i);
    if (c < best.value) best = {j, c};
  }
  return best;
}

// Fills nodes (ilo, ihi) exclusive, given the minimizers at both ends.
void divide_and_conquer(const SampledFn& phi0, double t, std::ptrdiff_t ilo, std::ptrdiff_t ihi,
                        std::vector<Candidate>& best) {
  if (ihi - ilo < 2) return;
  const std::ptrdiff_t mid = ilo + (ihi - ilo) / 2;
  best[static_cast<std::size_t>(mid)] =
      scan(phi0, t, mid, best[static_cast<std::size_t>(ilo)].index, best[static_cast<std::size_t>(ihi)].index);
  divide_and_conquer(phi0, t, ilo, mid, best);
  divide_and_conquer(phi0, t, mid, ihi, best);
}

}  // namespace

std::ptrdiff_t candidate_shift_range(const SampledFn& phi0, double t) {
  const double slope = derivative(phi0).max_abs();
  return static_cast<std::ptrdiff_t>(std::ceil(t * slope)) + 1;
}

HopfLaxSolution solve(const SampledFn& phi0, double t, const SolveOptions& opts) {
  require_positive_time(t, "hopf_lax::solve");
  const auto n = static_cast<std::ptrdiff_t>(phi0.size());
  const double h = phi0.spacing();
  const std::ptrdiff_t k = candidate_shift_range(phi0, t);
  const std::ptrdiff_t jmin = -k * n;
  const std::ptrdiff_t jmax = (k + 1) * n - 1;

  std::vector<Candidate> best(static_cast<std::size_t>(n));
  const std::size_t chunks = std::clamp<std::size_t>(opts.chunks == 0 ? max_threads() : opts.chunks, 1,
                                                     static_cast<std::size_t>(n));
  std::vector<std::size_t> bounds(chunks + 1);
  for (std::size_t c = 0; c <= chunks; ++c) bounds[c] = c * static_cast<std::size_t>(n) / chunks;

  // Each chunk is self-contained: full scans at its two ends, then the
  // monotone recursion in between. The result does not depend on chunking.
  const auto run_chunk = [&](std::size_t c) {
    const auto lo = static_cast<std::ptrdiff_t>(bounds[c]);
    const auto hi = static_cast<std::ptrdiff_t>(bounds[c + 1]) - 1;
    best[static_cast<std::size_t>(lo)] = scan(phi0, t, lo, jmin, jmax);
    if (hi > lo) {
      best[static_cast<std::size_t>(hi)] = scan(phi0, t, hi, best[static_cast<std::size_t>(lo)].index, jmax);
      divide_and_conquer(phi0, t, lo, hi, best);
    }
  };
  parallel_for(chunks, [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) run_chunk(c);
  });

  std::vector<double> phi(static_cast<std::size_t>(n));
  std::vector<double> a(static_cast<std::size_t>(n));
  std::vector<std::ptrdiff_t> idx(static_cast<std::size_t>(n));
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto s = static_cast<std::size_t>(i);
    const Candidate c = best[s];
    idx[s] = c.index;
    phi[s] = c.value;
    a[s] = static_cast<double>(c.index) * h;
    if (!opts.refine) continue;
    const double left = candidate_cost(phi0, t, c.index - 1, i);
    const double right = candidate_cost(phi0, t, c.index + 1, i);
    const double curvature = left - 2.0 * c.value + right;
    if (curvature > 0.0) {
      const double offset = std::clamp(0.5 * (left - right) / curvature, -0.5, 0.5);
      a[s] = (static_cast<double>(c.index) + offset) * h;
      phi[s] = std::min(c.value, c.value - 0.125 * (left - right) * (left - right) / curvature);
    }
  }
  if (opts.refine) {
    // The exact minimizer map is monotone; keep the refined one monotone too.
    for (std::size_t s = 1; s < a.size(); ++s) a[s] = std::max(a[s], a[s - 1]);
  }

  // u from the potential rather than from (x - a) / t: the centered
  // difference telescopes, so u keeps zero mean across shocks, and phi is
  // computed from integer offsets only, so u is exactly shift covariant.
  SampledFn potential(phi0.grid, std::move(phi));
  SampledFn u = derivative(potential);
  return HopfLaxSolution{t, std::move(potential), std::move(u), std::move(a), std::move(idx)};
}

double shock_time(const SampledFn& phi0) {
  if (phi0.size() < 4) throw InvalidArgument("shock_time needs at least 4 nodes");
  const SampledFn curv = second_difference(phi0);
  double compression = 0.0;
  for (double c : curv.values) compression = std::max(compression, -c);
  if (compression <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / compression;
}

double entropy_total(const HopfLaxSolution& sol) {
  double s = 0.0;
  for (double v : sol.u.values) s += 0.5 * v * v;
  return s * sol.u.spacing();
}

PointMinimum minimize_at(const SampledFn& phi0, double t, double x) {
  require_positive_time(t, "hopf_lax::minimize_at");
  const double h = phi0.spacing();
  const double reach = 1.05 * t * derivative_fourth_order(phi0).max_abs() + 4.0 * h;
  const auto jlo = static_cast<std::ptrdiff_t>(std::floor((x - reach) / h));
  const auto jhi = static_cast<std::ptrdiff_t>(std::ceil((x + reach) / h));
  PointMinimum best{jlo, std::numeric_limits<double>::infinity()};
  for (std::ptrdiff_t j = jlo; j <= jhi; ++j) {
    const double d = static_cast<double>(j) * h - x;
    const double c = phi0[j] + d * d / (2.0 * t);
    if (c < best.value) best = {j, c};
  }
  return best;
}

bool smooth_characteristics_check(const SampledFn& phi0, double t) {
  require_positive_time(t, "hopf_lax::smooth_characteristics_check");
  const SampledFn u0 = derivative_fourth_order(phi0);
  const double h = phi0.spacing();
  const double reach = 1.05 * t * u0.max_abs() + 4.0 * h;
  const auto n = static_cast<std::ptrdiff_t>(phi0.size());
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const double x = static_cast<double>(j) * h + t * u0.values[static_cast<std::size_t>(j)];
    const auto jlo = static_cast<std::ptrdiff_t>(std::floor((x - reach) / h));
    const auto jhi = static_cast<std::ptrdiff_t>(std::ceil((x + reach) / h));
    const double d0 = static_cast<double>(j) * h - x;
    const double own = phi0[j] + d0 * d0 / (2.0 * t);
    for (std::ptrdiff_t m = jlo; m <= jhi; ++m) {
      if (m == j) continue;
      const double d = static_cast<double>(m) * h - x;
      if (phi0[m] + d * d / (2.0 * t) <= own) return false;
    }
  }
  return true;
}

}  // namespace convexburgers::hopf_lax
