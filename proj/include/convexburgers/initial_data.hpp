#pragma once

#include <cstdint>
#include <vector>

#include "convexburgers/periodic.hpp"

namespace convexburgers::initial_data {

/// u0(x) = sum_k alpha_k sin(2 pi k x) + beta_k cos(2 pi k x), k = 1..degree.
struct TrigSeries {
  std::vector<double> alpha;
  std::vector<double> beta;

  std::size_t degree() const { return alpha.size(); }
};

/// Coefficients drawn uniformly from [-1, 1] by a seeded mt19937_64.
TrigSeries random_trig_series(std::uint64_t seed, int degree);

/// sin(2 pi k x) as a series.
TrigSeries sine_series(int k);

/// Samples of the series with the sample mean removed.
SampledFn sample(const PeriodicGrid& grid, const TrigSeries& series);

/// Exact zero-mean antiderivative of the series.
SampledFn sample_potential(const PeriodicGrid& grid, const TrigSeries& series);

inline SampledFn zero(const PeriodicGrid& grid) { return SampledFn::zeros(grid); }
inline SampledFn sine(const PeriodicGrid& grid, int k) { return sample(grid, sine_series(k)); }
inline SampledFn random_trig(const PeriodicGrid& grid, std::uint64_t seed, int degree) {
  return sample(grid, random_trig_series(seed, degree));
}

}  // namespace convexburgers::initial_data
